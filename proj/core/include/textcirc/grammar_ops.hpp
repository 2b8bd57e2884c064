#pragma once

#include <cstdint>
#include <string>

#include "textcirc/text.hpp"

namespace textcirc {

// Checks rule conformance of every derivation, link well-formedness and
// scope constraints.  Empty report == valid text.
ValidationReport validate(const HybridText& text);

// Left-to-right surface string: terminal tokens space-separated, items
// joined by ". ", relative-pronoun artefacts rendered per the conventions
// described in the README (WHO, THAT, !, ␣, [&], [THAT], fixed pronoun
// table).  No trailing period.
std::string yield_text(const HybridText& text);

// Yield of a single item (no trailing period).
std::string yield_item(const Derivation& item);

struct GenerateConfig {
  int max_sentences = 3;
  int max_depth = 3;
  int max_links = 2;
  // Chance (per mille) that a noun phrase grows an adjective, a verb phrase
  // an adverb/adposition, etc.  Decays geometrically with depth.
  int grow_per_mille = 350;
  // Share of compound sentence forms (scv/cnj/amp) at depth 0.
  int compound_per_mille = 300;
  // Chance that a generated link pair lands inside one simple sentence,
  // which exercises the reflexive path downstream.
  int reflexive_per_mille = 250;
  bool allow_fusions = false;  // also apply random relative-pronoun fusions
  Lexicon lexicon;
};

// Deterministic for a fixed seed; output always passes validate().
HybridText generate(std::uint64_t seed, const GenerateConfig& config);

// Small lexicon used by tests, generators and examples.
Lexicon demo_lexicon();

// --- relative pronoun transformations ----------------------------------

// Subject relative pronoun rule: `link` must be a two-occurrence plan whose
// later occurrence is the subject of a later item and whose earlier
// occurrence is a non-subject noun of an earlier item.  The later item is
// merged into the earlier one as a WHO clause on the antecedent.
HybridText fuse_subject_relative(const HybridText& text, const PronominalLink& link,
                                 ValidationReport* report = nullptr);

// Special case coordinating a noun across two phrases: subject of the later
// item points at the subject of the earlier one.  Produces the isolated
// noun (!), a WHO clause and the blanked second sentence.  A copular
// IS-adjective in the earlier item folds onto the isolated noun.
HybridText fuse_subject_relative_special(const HybridText& text, const PronominalLink& link,
                                         ValidationReport* report = nullptr);

// Object relative pronoun rule: object of the later item points at an
// object of the earlier one; the later occurrence becomes a blank.
HybridText fuse_object_relative(const HybridText& text, const PronominalLink& link,
                                ValidationReport* report = nullptr);

// Vets planned fusions (PronominalLink::fuse) and reflexive links against
// the ungrammaticality constraints: both relative rules on one fused pair,
// and reflexive pronouns spanning distinct simple constituents of a fused
// item.
ValidationReport check_fusion_order(const HybridText& text);

// Splits every relative-pronoun fusion back into plain sentences; links are
// preserved so the compiled circuit is unchanged.
HybridText decompose_relative_pronouns(const HybridText& text);

}  // namespace textcirc
