#include <functional>

#include "doctest.h"
#include "helpers.hpp"
#include "textcirc/diagram.hpp"

using namespace textcirc;
using testing::valid_text_of;

namespace {

int count_kind(const TextDiagram& d, NodeKind kind) {
  int n = 0;
  for (const auto& node : d.nodes)
    if (node.alive && node.kind == kind) ++n;
  return n;
}

int count_links(const TextDiagram& d) {
  int n = 0;
  for (const auto& w : d.wires)
    if (w.alive && w.type == WireType::PronLink) ++n;
  return n;
}

}  // namespace

TEST_CASE("the adposition example becomes a transitive cluster with three inputs") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))");
  TextDiagram d = from_text(t);
  CHECK(validate_diagram(d).ok());
  CHECK(d.inputs.size() == 3);
  CHECK(d.outputs.size() == 3);
  CHECK(count_kind(d, NodeKind::TvIntro) == 1);
  CHECK(count_kind(d, NodeKind::AdpTv) == 1);
  CHECK(count_kind(d, NodeKind::VLabel) == 1);
}

TEST_CASE("a sentential complement grows a region with crossings") {
  HybridText t = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (np BOB) (v DANCES)))))");
  TextDiagram d = from_text(t);
  CHECK(validate_diagram(d).ok());
  REQUIRE(d.regions.size() == 1);
  CHECK(d.regions[0].kind == ScopeRegion::Kind::ScvComplement);
  CHECK(count_kind(d, NodeKind::ScvIntro) == 1);
  CHECK(count_kind(d, NodeKind::ScopeEnterL) == 1);
  CHECK(count_kind(d, NodeKind::ScopeExitL) == 1);
  // BOB's label lives outside the bubble; its wire is flagged in-scope.
  bool found = false;
  for (const auto& in : d.inputs)
    if (in.label == "BOB") {
      found = true;
      CHECK(in.in_scope);
    }
  CHECK(found);

  // The intransitive cluster sits inside the region.
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    if (d.nodes[i].kind == NodeKind::IvIntro) CHECK(d.nodes[i].region == 0);
    if (d.nodes[i].kind == NodeKind::ScvIntro) CHECK(d.nodes[i].region == -1);
  }
}

TEST_CASE("a crossed noun phrase keeps its adjective outside the bubble") {
  HybridText crossed = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (xl (adj DRUNK (np BOB))) (v DANCES)))))");
  TextDiagram d = from_text(crossed);
  REQUIRE(validate_diagram(d).ok());
  for (const auto& n : d.nodes)
    if (n.alive && n.kind == NodeKind::AdjIntro) CHECK(n.region == -1);
  for (const auto& in : d.inputs)
    if (in.label == "BOB") CHECK_FALSE(in.in_scope);

  HybridText inside = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (adj DRUNK (np BOB)) (v DANCES)))))");
  TextDiagram d2 = from_text(inside);
  REQUIRE(validate_diagram(d2).ok());
  for (const auto& n : d2.nodes)
    if (n.alive && n.kind == NodeKind::AdjIntro) CHECK(n.region == 0);
}

TEST_CASE("a bare noun phrase is one labeled identity wire") {
  HybridText t = valid_text_of("(s (np! (np BOB)))");
  TextDiagram d = from_text(t);
  CHECK(validate_diagram(d).ok());
  CHECK(d.inputs.size() == 1);
  CHECK(d.outputs.size() == 1);
  CHECK(d.inputs[0].label == "BOB");
  CHECK(count_kind(d, NodeKind::IvIntro) == 0);
}

TEST_CASE("pronominal links chain occurrences and reflexive segments are flagged") {
  HybridText t = valid_text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(s (tv (np BOB) (o (v LIKES) (np BOB))))"
      "(link regular (0 0) (1 0) (1 1))");
  TextDiagram d = from_text(t);
  CHECK(validate_diagram(d).ok());
  CHECK(count_links(d) == 2);
  CHECK(count_kind(d, NodeKind::LinkOut) == 2);
  CHECK(count_kind(d, NodeKind::LinkIn) == 2);
  int reflexive = 0;
  for (const auto& w : d.wires)
    if (w.alive && w.type == WireType::PronLink && w.reflexive) ++reflexive;
  CHECK(reflexive == 1);
  // One labeled input for the whole chain, one dangling output.
  CHECK(d.inputs.size() == 1);
  CHECK(d.outputs.size() == 1);
}

TEST_CASE("from_text keeps distinct referents apart") {
  HybridText t = valid_text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(s (iv (np BOB) (v RUNS)))");
  TextDiagram d = from_text(t);
  CHECK(d.inputs.size() == 2);  // two BOBs, no link, two individuals
  CHECK(d.inputs[0].ref != d.inputs[1].ref);
}

TEST_CASE("same-referent occurrences share one connected component") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  TextDiagram d = from_text(t);
  REQUIRE(validate_diagram(d).ok());
  std::vector<int> parent(d.nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& w : d.wires) {
    if (!w.alive || w.from.node < 0 || w.to.node < 0) continue;
    parent[find(w.from.node)] = find(w.to.node);
  }
  std::vector<int> tvs;
  for (std::size_t i = 0; i < d.nodes.size(); ++i)
    if (d.nodes[i].kind == NodeKind::TvIntro) tvs.push_back(static_cast<int>(i));
  REQUIRE(tvs.size() == 2);
  CHECK(find(tvs[0]) == find(tvs[1]));
}

TEST_CASE("validate_diagram flags scope leaks and unbalanced boundaries") {
  HybridText t = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (np BOB) (v DANCES)))))");
  TextDiagram d = from_text(t);

  SUBCASE("verb wire crossing a border") {
    for (auto& n : d.nodes)
      if (n.kind == NodeKind::VLabel && n.region == 0) n.region = -1;
    CHECK(validate_diagram(d).has(ErrorCode::ScopeLeak));
  }
  SUBCASE("unbalanced noun boundary") {
    d.outputs.pop_back();
    CHECK(validate_diagram(d).has(ErrorCode::UnbalancedNP));
  }
}

TEST_CASE("diagram dot and dump are deterministic") {
  HybridText t = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (np BOB) (v DANCES)))))");
  TextDiagram d = from_text(t);
  CHECK(diagram_dot(d) == diagram_dot(d));
  CHECK(diagram_dot(d).find("cluster_r0") != std::string::npos);
  CHECK(diagram_dump(d).find("scv-intro") != std::string::npos);
}

TEST_CASE("scope tree mirrors the bracket nesting") {
  HybridText t = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope "
      "(scv (np BOB) (v HEARS) (scope (iv (np CLAIRE) (v RUNS)))))))");
  TextDiagram d = from_text(t);
  REQUIRE(validate_diagram(d).ok());
  REQUIRE(d.regions.size() == 2);
  CHECK(d.regions[0].parent == -1);
  CHECK(d.regions[1].parent == 0);
}

TEST_CASE("conjunctions get left and right regions") {
  HybridText t = valid_text_of(
      "(s (cnj SO (scope (iv (np BOB) (v DANCES))) (scope (iv (np ALICE) (v LAUGHS)))))");
  TextDiagram d = from_text(t);
  REQUIRE(validate_diagram(d).ok());
  REQUIRE(d.regions.size() == 2);
  CHECK(d.regions[0].kind == ScopeRegion::Kind::CnjLeft);
  CHECK(d.regions[1].kind == ScopeRegion::Kind::CnjRight);
  CHECK(count_kind(d, NodeKind::ScopeEnterR) == 1);  // left conjunct, phrase to the left
  CHECK(count_kind(d, NodeKind::ScopeEnterL) == 1);  // right conjunct
}
