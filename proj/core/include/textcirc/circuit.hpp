#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "textcirc/diagnostics.hpp"
#include "textcirc/text.hpp"

namespace textcirc {

struct TextCircuit;

struct NounWire {
  Ref ref = 0;
  std::string label;
  friend bool operator==(const NounWire& a, const NounWire& b) {
    return a.ref == b.ref && a.label == b.label;
  }
};

// Normal-form gate contents: an adjective, EXISTS, or a verb with its
// adposition block above its adverb block.  Wire arguments of a verb gate
// are subject [, object], then one extra wire per adposition.
struct GateCore {
  enum class Kind { Adj, Verb, Exists };
  Kind kind = Kind::Verb;
  std::string token;
  int verb_arity = 1;  // 1 or 2; meaningful for Kind::Verb only
  std::vector<std::string> adverbs;
  std::vector<std::string> adpositions;

  int arg_count() const {
    if (kind != Kind::Verb) return 1;
    return verb_arity + static_cast<int>(adpositions.size());
  }
  friend bool operator==(const GateCore& a, const GateCore& b);
};

// One event in a circuit: a gate, a sentential-complement box or a
// conjunction box.  pos_args lists the wire filling each structural
// position; a repeated wire together with `reflexive` models a reflexive
// pronoun box identifying those positions (a conjunction sharing wires is
// the same mechanism).  Hole circuits use local wire ids; position p of the
// instance binds hole wire p - <non-hole positions> to pos_args[p].
struct Instance {
  // ReflexGroup is a reflexive pronoun box holding a whole sub-circuit; the
  // shrinking rules recast it into per-gate boxes, so canonical circuits
  // never contain one.
  enum class Kind { Gate, Scv, Cnj, ReflexGroup };
  Kind kind = Kind::Gate;
  GateCore gate;                                  // Kind::Gate
  std::string token;                              // Scv / Cnj head word
  std::vector<std::string> adpositions;           // Scv extra-argument tokens
  std::vector<std::string> adverbs;               // Scv modifiers
  std::shared_ptr<const TextCircuit> hole;        // Scv
  std::shared_ptr<const TextCircuit> left, right; // Cnj
  std::shared_ptr<const TextCircuit> group;       // ReflexGroup content
  std::vector<int> pos_args;                      // indices into circuit wires
  bool reflexive = false;                         // repeats are identified positions

  int positions() const;
  // Distinct wires in first-appearance order.
  std::vector<int> distinct_args() const;
  bool has_repeats() const;
  // Identified position pairs (i < j), 1-based as in the reflexive box family.
  std::vector<std::pair<int, int>> reflexive_pairs() const;
};

// Noun wires acted on by a DAG of gates and boxes; equality is
// gate-connectivity (wire display order and parallel placement are
// quotiented, sequential order is not).
struct TextCircuit {
  std::vector<NounWire> wires;
  std::vector<Instance> instances;
  std::vector<std::vector<int>> events;  // per wire, instance ids in order

  bool empty() const { return wires.empty() && instances.empty(); }
  int wire_of_ref(Ref ref) const;

  // Appends an instance, pushing it onto the event list of each distinct
  // argument wire.
  int push(Instance inst);
};

ValidationReport validate_circuit(const TextCircuit& c);

// Sequential composition: shared referents are matched by id, event lists
// concatenated.  The empty circuit is the identity.
TextCircuit compose_seq(const TextCircuit& a, const TextCircuit& b);

// Parallel composition; referent sets must be disjoint (ReferentClash).
TextCircuit compose_par(const TextCircuit& a, const TextCircuit& b, ValidationReport* report = nullptr);

// Connectivity equality: a label-preserving referent bijection that
// preserves per-wire event order, argument positions and hole contents.
// Implemented as a backtracking matcher, independently of canonicalise.
bool equal(const TextCircuit& a, const TextCircuit& b);

// Deterministic serialized normal form; equal(a,b) iff canonical bytes
// coincide.  EXISTS gates are identity wires and vanish here.
struct CanonicalCircuit {
  std::string bytes;
  friend bool operator==(const CanonicalCircuit& a, const CanonicalCircuit& b) {
    return a.bytes == b.bytes;
  }
  friend bool operator<(const CanonicalCircuit& a, const CanonicalCircuit& b) {
    return a.bytes < b.bytes;
  }
};

CanonicalCircuit canonicalise(const TextCircuit& c);

// Rebuilds a circuit in canonical wire/instance order.
TextCircuit canonical_form(const TextCircuit& c);

// Dissolves EXISTS gates and reflexive group boxes (instances emitted in a
// topological order); wire order is preserved.
TextCircuit normalize_circuit(const TextCircuit& c);

struct FreeGenerateConfig {
  int max_wires = 6;
  int max_instances = 8;
  int max_hole_depth = 2;
  int max_modifiers = 2;
  int reflexive_per_mille = 200;
  int box_per_mille = 300;
  int untouched_wire_per_mille = 150;  // leave some wires gateless
  Lexicon lexicon;
};

// Random free composition of the circuit generators; valid and
// deterministic per seed.
TextCircuit free_generate(std::uint64_t seed, const FreeGenerateConfig& config);

// --- serialization ------------------------------------------------------

// Line-oriented .txc text; grammar in docs/formats.md.  serialize_circuit
// writes the circuit as stored; canonicalise().bytes is the same format in
// canonical order.
std::string serialize_circuit(const TextCircuit& c);

struct TxcParseResult {
  TextCircuit circuit;
  ValidationReport report;
  bool ok() const { return report.ok(); }
};
TxcParseResult parse_txc(const std::string& source);
TxcParseResult parse_txc_file(const std::string& path);

// Deterministic DOT rendering: wires as columns, gates as nodes, holes as
// clusters.
std::string render_dot(const TextCircuit& c);

}  // namespace textcirc
