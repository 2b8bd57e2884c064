#include <algorithm>

#include "doctest.h"
#include "textcirc/circuit.hpp"
#include "textcirc/grammar_ops.hpp"
#include "textcirc/rng.hpp"

using namespace textcirc;

namespace {

TextCircuit two_wire(const std::string& a, const std::string& b) {
  TextCircuit c;
  c.wires = {NounWire{0, a}, NounWire{1, b}};
  c.events.resize(2);
  return c;
}

Instance gate_iv(const std::string& token, int wire) {
  Instance g;
  g.kind = Instance::Kind::Gate;
  g.gate.kind = GateCore::Kind::Verb;
  g.gate.verb_arity = 1;
  g.gate.token = token;
  g.pos_args = {wire};
  return g;
}

Instance gate_tv(const std::string& token, int subject, int object) {
  Instance g;
  g.kind = Instance::Kind::Gate;
  g.gate.kind = GateCore::Kind::Verb;
  g.gate.verb_arity = 2;
  g.gate.token = token;
  g.pos_args = {subject, object};
  return g;
}

// Random wire permutation plus a shuffle of parallel instances; preserves
// connectivity, so it is a self-isomorphism.
TextCircuit self_isomorph(const TextCircuit& c, Rng& rng) {
  std::vector<int> perm(c.wires.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  rng.shuffle(perm);
  TextCircuit out;
  out.wires.resize(c.wires.size());
  for (std::size_t i = 0; i < c.wires.size(); ++i) out.wires[perm[i]] = c.wires[i];
  out.events.resize(c.wires.size());
  // Emit instances in a random linearization consistent with the events.
  std::vector<int> indeg(c.instances.size(), 0);
  std::vector<std::vector<int>> succ(c.instances.size());
  for (const auto& seq : c.events)
    for (std::size_t k = 1; k < seq.size(); ++k) {
      succ[seq[k - 1]].push_back(seq[k]);
      ++indeg[seq[k]];
    }
  std::vector<int> ready;
  for (std::size_t i = 0; i < c.instances.size(); ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  while (!ready.empty()) {
    int pick = rng.below(static_cast<int>(ready.size()));
    int id = ready[pick];
    ready.erase(ready.begin() + pick);
    Instance inst = c.instances[id];
    for (int& w : inst.pos_args) w = perm[w];
    out.push(std::move(inst));
    for (int j : succ[id])
      if (--indeg[j] == 0) ready.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("wire display order does not matter, sequential order does") {
  // LIKES(BOB, ALICE) with wires stored in either order.
  TextCircuit c1 = two_wire("BOB", "ALICE");
  c1.push(gate_tv("LIKES", 0, 1));
  TextCircuit c2 = two_wire("ALICE", "BOB");
  c2.wires[0].ref = 1;
  c2.wires[1].ref = 0;
  c2.push(gate_tv("LIKES", 1, 0));
  CHECK(equal(c1, c2));
  CHECK(canonicalise(c1) == canonicalise(c2));

  // DRINKS then RUNS on one wire vs the swapped order.
  TextCircuit s1 = two_wire("BOB", "ALICE");
  s1.push(gate_iv("DRINKS", 0));
  s1.push(gate_iv("RUNS", 0));
  TextCircuit s2 = two_wire("BOB", "ALICE");
  s2.push(gate_iv("RUNS", 0));
  s2.push(gate_iv("DRINKS", 0));
  CHECK_FALSE(equal(s1, s2));
  CHECK_FALSE(canonicalise(s1) == canonicalise(s2));
}

TEST_CASE("parallel gates slide freely") {
  TextCircuit c1 = two_wire("BOB", "ALICE");
  c1.push(gate_iv("DRINKS", 0));
  c1.push(gate_iv("RUNS", 1));
  TextCircuit c2 = two_wire("BOB", "ALICE");
  c2.push(gate_iv("RUNS", 1));
  c2.push(gate_iv("DRINKS", 0));
  CHECK(equal(c1, c2));
  CHECK(canonicalise(c1) == canonicalise(c2));
}

TEST_CASE("same labels, different referents stay distinct") {
  // Two BOB wires; the gate acts on one of them.  A circuit where it acts
  // on a lone BOB wire is still equal by relabeling the bijection, but
  // gate placement across distinct referents matters.
  TextCircuit c1 = two_wire("BOB", "BOB");
  c1.push(gate_iv("DRINKS", 0));
  c1.push(gate_iv("RUNS", 1));
  TextCircuit c2 = two_wire("BOB", "BOB");
  c2.push(gate_iv("DRINKS", 1));
  c2.push(gate_iv("RUNS", 0));
  CHECK(equal(c1, c2));

  TextCircuit c3 = two_wire("BOB", "BOB");
  c3.push(gate_iv("DRINKS", 0));
  c3.push(gate_iv("RUNS", 0));
  CHECK_FALSE(equal(c1, c3));
}

TEST_CASE("EXISTS gates are identity wires") {
  TextCircuit c1 = two_wire("BOB", "ALICE");
  Instance ex;
  ex.kind = Instance::Kind::Gate;
  ex.gate.kind = GateCore::Kind::Exists;
  ex.gate.token = Lexicon::kExists;
  ex.pos_args = {1};
  c1.push(gate_iv("DRINKS", 0));
  c1.push(std::move(ex));
  TextCircuit c2 = two_wire("BOB", "ALICE");
  c2.push(gate_iv("DRINKS", 0));
  CHECK(equal(c1, c2));
  CHECK(canonicalise(c1) == canonicalise(c2));
}

TEST_CASE("validate_circuit catches the spec error cases") {
  TextCircuit ok = two_wire("BOB", "ALICE");
  ok.push(gate_tv("LIKES", 0, 1));
  CHECK(validate_circuit(ok).ok());

  // Same wire twice without a reflexive box.
  TextCircuit dup = two_wire("BOB", "ALICE");
  dup.push(gate_tv("LIKES", 0, 0));
  CHECK(validate_circuit(dup).has(ErrorCode::DuplicateArg));

  // With the box it is fine.
  TextCircuit refl = two_wire("BOB", "ALICE");
  Instance g = gate_tv("LIKES", 0, 0);
  g.reflexive = true;
  refl.push(std::move(g));
  CHECK(validate_circuit(refl).ok());

  // Hole binding must agree with the outer wire's label.
  TextCircuit boxed = two_wire("ALICE", "BOB");
  Instance box;
  box.kind = Instance::Kind::Scv;
  box.token = "SEES";
  TextCircuit hole;
  hole.wires = {NounWire{0, "CLAIRE"}};
  hole.events.resize(1);
  box.hole = std::make_shared<const TextCircuit>(std::move(hole));
  box.pos_args = {0, 1};
  boxed.push(std::move(box));
  CHECK(validate_circuit(boxed).has(ErrorCode::WireOrderViolation));

  // Contradictory per-wire orders.
  TextCircuit cyc = two_wire("BOB", "ALICE");
  int a = cyc.push(gate_tv("LIKES", 0, 1));
  int b = cyc.push(gate_tv("HATES", 0, 1));
  std::swap(cyc.events[1][0], cyc.events[1][1]);
  (void)a;
  (void)b;
  CHECK(validate_circuit(cyc).has(ErrorCode::CycleDetected));
}

TEST_CASE("composition: sequential, parallel, identity") {
  TextCircuit drinks;
  drinks.wires = {NounWire{0, "BOB"}};
  drinks.events.resize(1);
  drinks.push(gate_iv("DRINKS", 0));

  TextCircuit likes;
  likes.wires = {NounWire{0, "BOB"}, NounWire{1, "ALICE"}};
  likes.events.resize(2);
  likes.push(gate_tv("LIKES", 0, 1));

  TextCircuit seq = compose_seq(drinks, likes);
  REQUIRE(seq.wires.size() == 2);
  CHECK(seq.events[0].size() == 2);  // both events on BOB's wire
  CHECK(validate_circuit(seq).ok());

  // Parallel demands disjoint referents.
  ValidationReport clash;
  compose_par(drinks, likes, &clash);
  CHECK(clash.has(ErrorCode::ReferentClash));

  TextCircuit other;
  other.wires = {NounWire{7, "DEE"}};
  other.events.resize(1);
  other.push(gate_iv("RUNS", 0));
  ValidationReport okrep;
  TextCircuit par = compose_par(drinks, other, &okrep);
  CHECK(okrep.ok());
  CHECK(par.wires.size() == 2);

  TextCircuit empty;
  CHECK(equal(compose_seq(drinks, empty), drinks));
  CHECK(equal(compose_seq(empty, drinks), drinks));
}

TEST_CASE("composition laws up to equality") {
  FreeGenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  cfg.max_wires = 3;
  cfg.max_instances = 3;
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    TextCircuit a = free_generate(1000 + i, cfg);
    TextCircuit b = free_generate(2000 + i, cfg);
    TextCircuit c = free_generate(3000 + i, cfg);
    // Make referents disjoint for the parallel laws.
    for (auto& w : b.wires) w.ref += 100;
    for (auto& w : c.wires) w.ref += 200;
    CHECK(equal(compose_seq(compose_seq(a, b), c), compose_seq(a, compose_seq(b, c))));
    CHECK(equal(compose_par(compose_par(a, b), c), compose_par(a, compose_par(b, c))));
    CHECK(equal(compose_par(a, b), compose_par(b, a)));
  }
}

TEST_CASE("free_generate yields valid deterministic circuits") {
  FreeGenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  TextCircuit a = free_generate(42, cfg);
  TextCircuit b = free_generate(42, cfg);
  CHECK(equal(a, b));
  CHECK(canonicalise(a) == canonicalise(b));
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    TextCircuit c = free_generate(seed, cfg);
    ValidationReport report = validate_circuit(c);
    CHECK_MESSAGE(report.ok(), "seed ", seed, ": ", report.to_string());
  }
}

TEST_CASE("canonicalisation is invariant under self-isomorphism") {
  FreeGenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  Rng rng(99);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    TextCircuit c = free_generate(seed, cfg);
    TextCircuit iso = self_isomorph(c, rng);
    REQUIRE_MESSAGE(validate_circuit(iso).ok(), "seed ", seed);
    CHECK_MESSAGE(canonicalise(c) == canonicalise(iso), "seed ", seed);
    CHECK_MESSAGE(equal(c, iso), "seed ", seed);
  }
}

TEST_CASE("equal is an equivalence relation on random triples") {
  FreeGenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  cfg.max_wires = 3;
  cfg.max_instances = 3;
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    TextCircuit a = free_generate(i, cfg);
    TextCircuit b = self_isomorph(a, rng);
    TextCircuit c = self_isomorph(b, rng);
    CHECK(equal(a, a));
    CHECK(equal(a, b));
    CHECK(equal(b, a));
    CHECK(equal(b, c));
    CHECK(equal(a, c));
  }
}

TEST_CASE("serialization round-trips through parse") {
  FreeGenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TextCircuit c = free_generate(seed, cfg);
    std::string bytes = serialize_circuit(c);
    TxcParseResult parsed = parse_txc(bytes);
    REQUIRE_MESSAGE(parsed.ok(), "seed ", seed, ": ", parsed.report.to_string());
    CHECK(canonicalise(parsed.circuit) == canonicalise(c));
    // Canonical bytes are a fixpoint.
    std::string canon = canonicalise(c).bytes;
    TxcParseResult reparsed = parse_txc(canon);
    REQUIRE(reparsed.ok());
    CHECK(canonicalise(reparsed.circuit).bytes == canon);
  }
}

TEST_CASE("render_dot is deterministic and covers holes") {
  TextCircuit boxed = two_wire("ALICE", "BOB");
  Instance box;
  box.kind = Instance::Kind::Scv;
  box.token = "SEES";
  TextCircuit hole;
  hole.wires = {NounWire{0, "BOB"}};
  hole.events.resize(1);
  hole.push(gate_iv("DANCES", 0));
  box.hole = std::make_shared<const TextCircuit>(std::move(hole));
  box.pos_args = {0, 1};
  boxed.push(std::move(box));
  std::string dot = render_dot(boxed);
  CHECK(dot == render_dot(boxed));
  CHECK(dot.find("cluster_0") != std::string::npos);
  CHECK(dot.find("SEES") != std::string::npos);
  CHECK(render_dot(TextCircuit{}) == "digraph textcircuit {\n  rankdir=TB;\n}\n");
}
