#pragma once

#include "textcirc/diagram.hpp"
#include "textcirc/rewrite.hpp"

namespace textcirc {

// Grammar extensions by postulated equations: each reduction removes the
// extension-only pieces (TvpPsv regions, PossLink wires, IngMark nodes) and
// leaves a core-fragment diagram compiling to the equivalent circuit.  They
// run as a pre-pass before link elimination.

// Passive voice: region eliminated, subject/object swapped, participle
// mapped back to its active token (UnknownPassiveForm if unmapped).
RewriteResult reduce_passive(const TextDiagram& d, const Lexicon& lexicon);

// Possessive pronouns: each PossLink becomes an OWNS gate from possessor to
// possessed, placed after the gates of the possessed noun's sentence.
RewriteResult reduce_possessive(const TextDiagram& d);

// Gerund -ING in adjective position becomes the underlying intransitive
// verb gate on the same noun wire.
RewriteResult reduce_ing(const TextDiagram& d);

// All three in pipeline order.
RewriteResult reduce_extensions(const TextDiagram& d, const Lexicon& lexicon);

bool has_extension_pieces(const TextDiagram& d);

}  // namespace textcirc
