#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "textcirc/rewrite.hpp"

using namespace textcirc;
using testing::valid_text_of;

namespace {

TextCircuit compile_ok(const HybridText& t) {
  CompileResult r = compile(t);
  REQUIRE_MESSAGE(r.ok(), r.report.to_string());
  ValidationReport v = validate_circuit(r.circuit);
  REQUIRE_MESSAGE(v.ok(), v.to_string());
  return r.circuit;
}

bool measures_decrease(const RewriteTrace& trace, RewriteRule stage_rule) {
  for (const auto& s : trace.steps)
    if (s.rule == stage_rule && s.measure_after >= s.measure_before) return false;
  return true;
}

}  // namespace

TEST_CASE("one intransitive sentence compiles to one gate on one wire") {
  TextCircuit c = compile_ok(valid_text_of("(s (iv (np BOB) (v DRINKS)))"));
  REQUIRE(c.wires.size() == 1);
  REQUIRE(c.instances.size() == 1);
  CHECK(c.instances[0].gate.token == "DRINKS");
  CHECK(c.instances[0].gate.verb_arity == 1);
  CHECK(c.wires[0].label == "BOB");
}

TEST_CASE("empty text compiles to the empty circuit") {
  HybridText t;
  t.lexicon = demo_lexicon();
  TextCircuit c = compile_ok(t);
  CHECK(c.empty());
}

TEST_CASE("an intransitive with adposition and adverb makes one gate") {
  // ALICE QUICKLY RUNS TOWARDS BOB, with the adverb applied outermost.
  TextCircuit c = compile_ok(valid_text_of(
      "(s (iv (np ALICE) (adv QUICKLY (adpv (v RUNS) TOWARDS (np BOB)))))"));
  REQUIRE(c.instances.size() == 1);
  const GateCore& g = c.instances[0].gate;
  CHECK(g.token == "RUNS");
  CHECK(g.adverbs == std::vector<std::string>{"QUICKLY"});
  CHECK(g.adpositions == std::vector<std::string>{"TOWARDS"});
  REQUIRE(c.wires.size() == 2);
  CHECK(c.instances[0].pos_args.size() == 2);

  // The other derivation order gives the equal gate.
  TextCircuit c2 = compile_ok(valid_text_of(
      "(s (iv (np ALICE) (adpv (adv QUICKLY (v RUNS)) TOWARDS (np BOB))))"));
  CHECK(equal(c, c2));
  CHECK(canonicalise(c) == canonicalise(c2));
}

TEST_CASE("adverb gather order is irrelevant") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (iv (np ALICE) (adv QUICKLY (adv HAPPILY (v RUNS)))))"));
  REQUIRE(c.instances.size() == 1);
  CHECK(c.instances[0].gate.adverbs == std::vector<std::string>{"QUICKLY", "HAPPILY"});
}

TEST_CASE("adpositions gather in textual order") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (iv (np ALICE) (adpv (adpv (v RUNS) TOWARDS (np BOB)) FOR (np CLAIRE))))"));
  REQUIRE(c.instances.size() == 1);
  CHECK(c.instances[0].gate.adpositions == std::vector<std::string>{"TOWARDS", "FOR"});
  // Argument order: subject, then the extra nouns in textual order.
  REQUIRE(c.wires.size() == 3);
  CHECK(c.wires[c.instances[0].pos_args[0]].label == "ALICE");
  CHECK(c.wires[c.instances[0].pos_args[1]].label == "BOB");
  CHECK(c.wires[c.instances[0].pos_args[2]].label == "CLAIRE");
}

TEST_CASE("copular IS becomes an adjective gate") {
  TextCircuit c = compile_ok(valid_text_of("(s (is (np BOB) (padj DRUNK)))"));
  REQUIRE(c.instances.size() == 1);
  CHECK(c.instances[0].gate.kind == GateCore::Kind::Adj);
  CHECK(c.instances[0].gate.token == "DRUNK");
}

TEST_CASE("links compose sentences sequentially on the shared wire") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))"));
  REQUIRE(c.wires.size() == 3);
  REQUIRE(c.instances.size() == 2);
  int bob = -1;
  for (std::size_t w = 0; w < c.wires.size(); ++w)
    if (c.wires[w].label == "BOB") bob = static_cast<int>(w);
  REQUIRE(bob >= 0);
  REQUIRE(c.events[bob].size() == 2);
  CHECK(c.instances[c.events[bob][0]].gate.token == "LIKES");
  CHECK(c.instances[c.events[bob][1]].gate.token == "HATES");
}

TEST_CASE("link-free diagram is unchanged by eliminate_links") {
  HybridText t = valid_text_of("(s (iv (np BOB) (v DRINKS)))");
  TextDiagram d = from_text(t);
  RewriteResult r = eliminate_links(d);
  CHECK(r.ok());
  CHECK(r.trace.steps.empty());
}

TEST_CASE("reflexive links become reflexive gates, policy first") {
  HybridText t = valid_text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(s (tv (np BOB) (o (v LIKES) (np BOB))))"
      "(link regular (0 0) (1 0) (1 1))");
  TextDiagram d = from_text(t);
  RewriteResult r = eliminate_links(d);
  REQUIRE_MESSAGE(r.ok(), r.report.to_string());
  REQUIRE_FALSE(r.trace.steps.empty());
  // The reflexive introduction comes before the plain elimination.
  CHECK(r.trace.steps.front().rule == RewriteRule::ReflexIntro);

  TextCircuit c = compile_ok(t);
  REQUIRE(c.wires.size() == 1);
  REQUIRE(c.instances.size() == 2);
  CHECK(c.instances[c.events[0][0]].gate.token == "DRINKS");
  const Instance& likes = c.instances[c.events[0][1]];
  CHECK(likes.gate.token == "LIKES");
  CHECK(likes.reflexive);
  CHECK(likes.pos_args == std::vector<int>{0, 0});
  CHECK(likes.reflexive_pairs() == std::vector<std::pair<int, int>>{{1, 2}});
}

TEST_CASE("the critical pair example converges under every policy order") {
  HybridText t = valid_text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(s (tv (np BOB) (o (v LIKES) (np BOB))))"
      "(link regular (0 0) (1 0) (1 1))");
  TextDiagram d = from_text(t);
  std::set<CanonicalCircuit> results = enumerate_orders(d, 500);
  CHECK(results.size() == 1);
}

TEST_CASE("sentential complements reduce to boxes with holes") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (np BOB) (v DANCES)))))"));
  REQUIRE(c.wires.size() == 2);
  REQUIRE(c.instances.size() == 1);
  const Instance& box = c.instances[0];
  CHECK(box.kind == Instance::Kind::Scv);
  CHECK(box.token == "SEES");
  REQUIRE(box.hole != nullptr);
  REQUIRE(box.hole->wires.size() == 1);
  CHECK(box.hole->wires[0].label == "BOB");
  REQUIRE(box.hole->instances.size() == 1);
  CHECK(box.hole->instances[0].gate.token == "DANCES");
  // Subject first, hole wire second.
  CHECK(c.wires[box.pos_args[0]].label == "ALICE");
  CHECK(c.wires[box.pos_args[1]].label == "BOB");
}

TEST_CASE("conjunctions with disjoint nouns make a two-hole box") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (cnj SO (scope (iv (np BOB) (v DANCES))) (scope (iv (np ALICE) (v LAUGHS)))))"));
  REQUIRE(c.instances.size() == 1);
  const Instance& box = c.instances[0];
  CHECK(box.kind == Instance::Kind::Cnj);
  CHECK(box.token == "SO");
  REQUIRE(box.left != nullptr);
  REQUIRE(box.right != nullptr);
  CHECK(box.left->instances.size() == 1);
  CHECK(box.right->instances.size() == 1);
  CHECK_FALSE(box.has_repeats());
}

TEST_CASE("conjunctions sharing a referent use the shared-wire form") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (cnj SO (scope (iv (np BOB) (v DANCES))) (scope (iv (np BOB) (v LAUGHS)))))"
      "(link regular (0 0) (0 1))"));
  REQUIRE(c.wires.size() == 1);
  REQUIRE(c.instances.size() == 1);
  const Instance& box = c.instances[0];
  CHECK(box.kind == Instance::Kind::Cnj);
  CHECK(box.has_repeats());
  CHECK(box.reflexive);
}

TEST_CASE("a noun wire through a complement with EXISTS stays gateless") {
  TextCircuit c = compile_ok(valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (amp "
      "(is (np BOB) (padj DRUNK)) (iv (np CLAIRE) (v EXISTS))))))"));
  REQUIRE(c.instances.size() == 1);
  const Instance& box = c.instances[0];
  REQUIRE(box.hole != nullptr);
  REQUIRE(box.hole->wires.size() == 2);
  int claire = box.hole->wires[0].label == "CLAIRE" ? 0 : 1;
  CHECK(box.hole->wires[claire].label == "CLAIRE");
  CHECK(box.hole->events[claire].empty());
  CHECK(box.hole->events[1 - claire].size() == 1);
}

TEST_CASE("fused and split subject relatives compile to equal circuits") {
  HybridText split = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  HybridText fused = fuse_subject_relative(split, split.links[0]);
  REQUIRE(validate(fused).ok());
  CHECK(equal(compile_ok(split), compile_ok(fused)));
}

TEST_CASE("the special subject relative compiles to adjective then verb") {
  HybridText split = valid_text_of(
      "(s (is (np ALICE) (padj SOBER)))"
      "(s (tv (np ALICE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))"
      "(link regular (0 0) (1 0))");
  TextCircuit c = compile_ok(split);
  int alice = -1;
  for (std::size_t w = 0; w < c.wires.size(); ++w)
    if (c.wires[w].label == "ALICE") alice = static_cast<int>(w);
  REQUIRE(alice >= 0);
  REQUIRE(c.events[alice].size() == 2);
  CHECK(c.instances[c.events[alice][0]].gate.kind == GateCore::Kind::Adj);
  CHECK(c.instances[c.events[alice][1]].gate.token == "GIVES");

  HybridText fused = fuse_subject_relative_special(split, split.links[0]);
  REQUIRE(validate(fused).ok());
  CHECK(equal(c, compile_ok(fused)));
}

TEST_CASE("object relative fusion preserves the circuit") {
  HybridText split = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np CLAIRE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))"
      "(link regular (0 1) (1 2))");
  HybridText fused = fuse_object_relative(split, split.links[0]);
  REQUIRE(validate(fused).ok());
  CHECK(equal(compile_ok(split), compile_ok(fused)));
}

TEST_CASE("decomposing random fusions preserves circuits") {
  HybridText split = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(s (iv (np CLAIRE) (v RUNS)))"
      "(link regular (0 1) (1 0))"
      "(link regular (1 1) (2 0))");
  HybridText fused = fuse_subject_relative(split, split.links[0]);
  REQUIRE(validate(fused).ok());
  HybridText decomposed = decompose_relative_pronouns(fused);
  REQUIRE(validate(decomposed).ok());
  CHECK(equal(compile_ok(fused), compile_ok(decomposed)));
  CHECK(equal(compile_ok(split), compile_ok(decomposed)));
}

TEST_CASE("compile is deterministic under match-order shuffling") {
  GenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    HybridText t = generate(seed, cfg);
    CompileResult base = compile(t);
    REQUIRE_MESSAGE(base.ok(), "seed ", seed, ": ", base.report.to_string());
    CanonicalCircuit want = canonicalise(base.circuit);
    for (int s = 1; s <= 3; ++s) {
      RewriteOptions opts;
      opts.shuffle = true;
      opts.shuffle_seed = seed * 10 + s;
      CompileResult shuffled = compile(t, opts);
      REQUIRE_MESSAGE(shuffled.ok(), "seed ", seed, ": ", shuffled.report.to_string());
      CHECK_MESSAGE(canonicalise(shuffled.circuit) == want, "seed ", seed, " shuffle ", s);
    }
  }
}

TEST_CASE("rewrite measures strictly decrease per stage") {
  HybridText t = valid_text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(s (tv (np BOB) (adpo (o (adv DEEPLY (v LIKES)) (np BOB)) WITH (np BEER))))"
      "(link regular (0 0) (1 0) (1 1))");
  CompileResult r = compile(t);
  REQUIRE_MESSAGE(r.ok(), r.report.to_string());
  CHECK(measures_decrease(r.trace, RewriteRule::LinkElim1));
  CHECK(measures_decrease(r.trace, RewriteRule::ReflexIntro));
  CHECK(measures_decrease(r.trace, RewriteRule::AdvGather));
  CHECK(measures_decrease(r.trace, RewriteRule::AdpGather));
  CHECK(measures_decrease(r.trace, RewriteRule::GateContract));
  CHECK(measures_decrease(r.trace, RewriteRule::ScvReduce));
  CHECK(measures_decrease(r.trace, RewriteRule::CnjReduce));
}

TEST_CASE("boundary referents are preserved along the trace") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  TextDiagram d = from_text(t);
  auto boundary = [](const TextDiagram& dd) {
    std::multiset<Ref> in, out;
    for (const auto& p : dd.inputs) in.insert(p.ref);
    for (const auto& p : dd.outputs) out.insert(p.ref);
    return std::make_pair(in, out);
  };
  auto want = boundary(d);
  RewriteResult r1 = eliminate_links(d);
  REQUIRE(r1.ok());
  CHECK(boundary(r1.diagram) == want);
  RewriteResult r2 = normalise_gates(r1.diagram);
  REQUIRE(r2.ok());
  CHECK(boundary(r2.diagram) == want);
  RewriteResult r3 = reduce_scopes(r2.diagram);
  REQUIRE(r3.ok());
  CHECK(boundary(r3.diagram) == want);
}

TEST_CASE("trace replay reproduces the compiled circuit") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  TextDiagram d = from_text(t);
  CompileResult r = to_circuit(d);
  REQUIRE(r.ok());
  TextDiagram replayed;
  CHECK(replay_trace(d, r.trace, &replayed));
}

TEST_CASE("gate normalisation is confluent for up to three modifiers") {
  // Mixed adverb/adposition towers in both derivation orders.
  const char* variants[] = {
      "(s (iv (np ALICE) (adv QUICKLY (adv HAPPILY (adpv (v RUNS) TOWARDS (np BOB))))))",
      "(s (iv (np ALICE) (adv QUICKLY (adpv (adv HAPPILY (v RUNS)) TOWARDS (np BOB)))))",
      "(s (iv (np ALICE) (adpv (adv QUICKLY (adv HAPPILY (v RUNS))) TOWARDS (np BOB))))",
  };
  std::set<CanonicalCircuit> canon;
  for (const char* v : variants) {
    HybridText t = valid_text_of(v);
    TextDiagram d = from_text(t);
    std::set<CanonicalCircuit> orders = enumerate_orders(d, 2000);
    CHECK(orders.size() == 1);
    canon.insert(*orders.begin());
  }
  CHECK(canon.size() == 1);
}
