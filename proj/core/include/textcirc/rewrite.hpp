#pragma once

#include <cstdint>
#include <functional>
#include <set>

#include "textcirc/diagram.hpp"

namespace textcirc {

enum class RewriteRule {
  LinkElim1,
  LinkElim2,
  LinkElimTwistL,
  LinkElimTwistR,
  ReflexIntro,
  ReflexAssoc,
  ReflexIdentity,
  ReflexSplit,
  ReflexSlide,
  IsElimination,
  AdvGather,
  AdvAssoc,
  AdpIVAncilla,
  AdpTVAncilla,
  AdpGather,
  AdpAssoc,
  AdpAdvOrder,
  GateContract,
  ScvReduce,
  CnjReduce,
  CnjSharedReduce,
  ScopeCap,
  ExistsIntro,
  AmpersandReduce,
  PassiveReduce,
  PossessiveReduce,
  IngReduce,
};

const char* rewrite_rule_name(RewriteRule rule);

struct TraceStep {
  RewriteRule rule;
  std::vector<int> nodes;  // matched node ids (wire ids for link rules)
  // Stage measure before/after; every step strictly decreases it.
  int measure_before = 0;
  int measure_after = 0;
};

struct RewriteTrace {
  std::vector<TraceStep> steps;
  std::string to_string() const;
};

// Match scheduling: the engine collects the applicable matches of the
// current stage in a deterministic order and asks the picker which to apply
// next.  The default picker takes the first; a seeded picker shuffles
// (criterion: compilation is order-independent under the staged policy);
// the enumerator explores every choice.
struct RewriteOptions {
  bool shuffle = false;
  std::uint64_t shuffle_seed = 0;
};

struct RewriteResult {
  TextDiagram diagram;
  RewriteTrace trace;
  ValidationReport report;
  bool ok() const { return report.ok(); }
};

// Stage 1: reflexive identifications first (doubling-back segments become
// reflexive marks), then remaining pronominal links become sequential wire
// composition.  Fails with CyclicLink if a non-reflexive link doubles back.
RewriteResult eliminate_links(const TextDiagram& d, const RewriteOptions& opts = {});

// Stage 2: reflexive-group boxes are recast so every box holds exactly one
// gate (associativity / identity / splitting / sliding).  A no-op on
// pipeline output, which is already in that form; hand-built diagrams with
// multi-gate reflexive groups get shrunk here.
RewriteResult shrink_reflexive(const TextDiagram& d, const RewriteOptions& opts = {});

// Stage 3: gate normalisation inside each region, innermost first: IS
// elimination, ancilla introduction, gathers, adp-above-adv ordering, then
// contraction to GateNodes.
RewriteResult normalise_gates(const TextDiagram& d, const RewriteOptions& opts = {});

// Stage 4: innermost regions collapse into Scv/Cnj boxes; [&] regions
// dissolve into composition; EXISTS gates become identity wires.
RewriteResult reduce_scopes(const TextDiagram& d, const RewriteOptions& opts = {});

struct CompileResult {
  TextCircuit circuit;
  RewriteTrace trace;
  ValidationReport report;
  bool ok() const { return report.ok(); }
};

// Full pipeline from a diagram: extension reductions, link elimination,
// reflexive shrinking, gate normalisation, scope reduction, extraction.
CompileResult to_circuit(const TextDiagram& d, const RewriteOptions& opts = {});

// from_text + to_circuit.  `text` must validate.
CompileResult compile(const HybridText& text, const RewriteOptions& opts = {});

// Replays a recorded trace step by step on `initial`; returns false if any
// step no longer applies.  Used by the trace-replay property tests.
bool replay_trace(const TextDiagram& initial, const RewriteTrace& trace, TextDiagram* out);

// Runs the pipeline under every policy-respecting choice order (up to
// `max_orders` sequences) and returns the set of canonical results.
// Confluence holds iff the set is a singleton.
std::set<CanonicalCircuit> enumerate_orders(const TextDiagram& d, int max_orders,
                                            ValidationReport* report = nullptr);

}  // namespace textcirc
