#include "doctest.h"
#include "helpers.hpp"
#include "textcirc/hgt_io.hpp"

using namespace textcirc;

TEST_CASE("hgt round-trips structurally and byte-stably") {
  GenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    HybridText t = generate(seed, cfg);
    std::string once = print_hgt(t);
    HgtParseResult parsed = parse_hgt(once);
    REQUIRE_MESSAGE(parsed.ok(), parsed.report.to_string());
    CHECK(parsed.text.items == t.items);
    CHECK(parsed.text.links.size() == t.links.size());
    CHECK(print_hgt(parsed.text) == once);
  }
}

TEST_CASE("hgt parse reports malformed input") {
  CHECK(parse_hgt("(text (s (iv (np BOB)").report.has(ErrorCode::ParseError));
  CHECK(parse_hgt("(nope)").report.has(ErrorCode::ParseError));
  CHECK(parse_hgt("(text (s (frob X)))").report.has(ErrorCode::ParseError));
  CHECK(parse_hgt("(text (link sideways (0 0) (1 0)))").report.has(ErrorCode::ParseError));
  CHECK(parse_hgt("").ok());  // empty file is the empty text
}

TEST_CASE("hgt keeps lexicon and passive forms") {
  std::string src =
      "(text\n"
      "  (lexicon\n"
      "    (ALICE n)\n"
      "    (LIKES tv)\n"
      "    (passive LIKES LIKED))\n"
      "  (s (tv (np ALICE) (o (v LIKES) (np ALICE))))\n"
      "  (link reflexive (0 0) (0 1))\n"
      ")\n";
  HgtParseResult parsed = parse_hgt(src);
  REQUIRE_MESSAGE(parsed.ok(), parsed.report.to_string());
  CHECK(parsed.text.lexicon.is("ALICE", WordClass::N));
  CHECK(parsed.text.lexicon.active_of("LIKED") == std::string("LIKES"));
  REQUIRE(parsed.text.links.size() == 1);
  CHECK(parsed.text.links[0].kind == LinkKind::Reflexive);
  CHECK(print_hgt(parsed.text) == src);
}

TEST_CASE("comments and whitespace are ignored") {
  HgtParseResult parsed = parse_hgt(
      "(text ; a remark\n"
      "  (s (iv (np BOB) (v DRINKS))) ; another\n"
      ")");
  CHECK(parsed.ok());
  // BOB/DRINKS come from the file's (empty) lexicon; validation is separate.
  CHECK(parsed.text.items.size() == 1);
}
