#include "doctest.h"
#include "helpers.hpp"
#include "textcirc/grammar_ops.hpp"

using namespace textcirc;
using testing::text_of;
using testing::valid_text_of;

TEST_CASE("validate accepts a simple intransitive sentence") {
  HybridText t = text_of("(s (iv (np BOB) (v DRINKS)))");
  CHECK(validate(t).ok());
}

TEST_CASE("validate accepts the empty text") {
  HybridText t;
  t.lexicon = demo_lexicon();
  CHECK(validate(t).ok());
  CHECK(yield_text(t).empty());
}

TEST_CASE("validate rejects a production that does not exist") {
  // An S whose parts are a noun phrase and a bare adverb.
  HybridText t = text_of("(s (iv (np BOB) (adv QUICKLY (np ALICE))))");
  ValidationReport report = validate(t);
  CHECK_FALSE(report.ok());
  CHECK(report.has(ErrorCode::RuleMismatch));
}

TEST_CASE("validate catches unknown tokens and bad links") {
  HybridText t = text_of("(s (iv (np ZORG) (v DRINKS)))");
  CHECK(validate(t).has(ErrorCode::UnknownToken));

  HybridText t2 = text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(link regular (0 0) (2 5))");
  CHECK(validate(t2).has(ErrorCode::BadLink));

  // Chains must be textually ordered.
  HybridText t3 = text_of(
      "(s (tv (np BOB) (o (v LIKES) (np ALICE))))"
      "(link regular (0 1) (0 0))");
  CHECK(validate(t3).has(ErrorCode::BadLink));
}

TEST_CASE("yield of the adposition example") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))");
  CHECK(yield_text(t) == "ALICE GIVES BEER TO BOB");
}

TEST_CASE("yield renders crossed noun phrases outside their scope") {
  HybridText t = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (xl (adj DRUNK (np BOB))) (v DANCES)))))");
  CHECK(yield_text(t) == "ALICE SEES DRUNK BOB [THAT] DANCES");

  HybridText in_scope = valid_text_of(
      "(s (scv (np ALICE) (v SEES) (scope (iv (adj DRUNK (np BOB)) (v DANCES)))))");
  CHECK(yield_text(in_scope) == "ALICE SEES [THAT] DRUNK BOB DANCES");
}

TEST_CASE("scope crossing needs a clear path to the border") {
  // The object cannot cross left past the verb.
  HybridText t = text_of(
      "(s (scv (np ALICE) (v SEES) (scope (tv (np BOB) (o (v LIKES) (xl (np DEE)))))))");
  CHECK(validate(t).has(ErrorCode::ScopeViolation));

  // It may cross right.
  HybridText t2 = text_of(
      "(s (scv (np ALICE) (v SEES) (scope (tv (np BOB) (o (v LIKES) (xr (np DEE)))))))");
  CHECK(validate(t2).ok());

  // Crossing wrappers outside any scope are meaningless.
  HybridText t3 = text_of("(s (iv (xl (np BOB)) (v DRINKS)))");
  CHECK(validate(t3).has(ErrorCode::ScopeViolation));
}

TEST_CASE("generate is deterministic and always validates") {
  GenerateConfig cfg;
  cfg.lexicon = demo_lexicon();
  HybridText a = generate(7, cfg);
  HybridText b = generate(7, cfg);
  CHECK(a.items == b.items);
  CHECK(a.links.size() == b.links.size());
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    HybridText t = generate(seed, cfg);
    ValidationReport report = validate(t);
    CHECK_MESSAGE(report.ok(), "seed ", seed, ": ", report.to_string());
  }
}

TEST_CASE("subject relative pronoun rule fuses two sentences") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  ValidationReport report;
  HybridText fused = fuse_subject_relative(t, t.links[0], &report);
  REQUIRE_MESSAGE(report.ok(), report.to_string());
  REQUIRE(fused.items.size() == 1);
  CHECK(yield_text(fused) == "ALICE LIKES BOB WHO HATES CLAIRE");
  CHECK(validate(fused).ok());

  // The chain survives internally, re-addressed.
  REQUIRE(fused.links.size() == 1);
  CHECK(fused.links[0].chain.size() == 2);
}

TEST_CASE("subject relative rule refuses an object occurrence") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np CLAIRE) (o (v HATES) (np BOB))))"
      "(link regular (0 1) (1 1))");
  ValidationReport report;
  fuse_subject_relative(t, t.links[0], &report);
  CHECK(report.has(ErrorCode::PreconditionViolation));
}

TEST_CASE("special subject relative rule produces the isolated noun structure") {
  HybridText t = valid_text_of(
      "(s (is (np ALICE) (padj SOBER)))"
      "(s (tv (np ALICE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))"
      "(link regular (0 0) (1 0))");
  ValidationReport report;
  HybridText fused = fuse_subject_relative_special(t, t.links[0], &report);
  REQUIRE_MESSAGE(report.ok(), report.to_string());
  REQUIRE(fused.items.size() == 1);
  CHECK(yield_text(fused) == "SOBER ALICE ! WHO ␣ GIVES BEER TO BOB");
  CHECK(validate(fused).ok());
}

TEST_CASE("special subject relative rule requires both subjects") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  ValidationReport report;
  fuse_subject_relative_special(t, t.links[0], &report);
  CHECK(report.has(ErrorCode::PreconditionViolation));
}

TEST_CASE("object relative pronoun rule blanks the second occurrence") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np CLAIRE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))"
      "(link regular (0 1) (1 2))");
  ValidationReport report;
  HybridText fused = fuse_object_relative(t, t.links[0], &report);
  REQUIRE_MESSAGE(report.ok(), report.to_string());
  CHECK(yield_text(fused) == "ALICE LIKES BOB THAT CLAIRE GIVES BEER TO ␣");
  CHECK(validate(fused).ok());
}

TEST_CASE("object relative pronoun rule refuses a subject occurrence") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  ValidationReport report;
  fuse_object_relative(t, t.links[0], &report);
  CHECK(report.has(ErrorCode::PreconditionViolation));
}

TEST_CASE("decompose undoes a subject relative fusion") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np BOB) (o (v HATES) (np CLAIRE))))"
      "(link regular (0 1) (1 0))");
  HybridText fused = fuse_subject_relative(t, t.links[0]);
  HybridText split = decompose_relative_pronouns(fused);
  REQUIRE(split.items.size() == 2);
  CHECK(split.items == t.items);
  REQUIRE(split.links.size() == 1);
  CHECK(split.links[0].chain == t.links[0].chain);
}

TEST_CASE("decompose undoes the special fusion exactly") {
  HybridText t = valid_text_of(
      "(s (is (np ALICE) (padj SOBER)))"
      "(s (tv (np ALICE) (adpo (o (v GIVES) (np BEER)) TO (np BOB))))"
      "(link regular (0 0) (1 0))");
  HybridText fused = fuse_subject_relative_special(t, t.links[0]);
  HybridText split = decompose_relative_pronouns(fused);
  REQUIRE(split.items.size() == 2);
  CHECK(split.items == t.items);
  REQUIRE(split.links.size() == 1);
  CHECK(split.links[0].chain == t.links[0].chain);
}

TEST_CASE("decompose leaves fusion-free text unchanged") {
  HybridText t = valid_text_of(
      "(s (iv (np BOB) (v DRINKS)))"
      "(s (iv (np ALICE) (v RUNS)))");
  HybridText out = decompose_relative_pronouns(t);
  CHECK(out.items == t.items);
}

TEST_CASE("check_fusion_order rejects double fusion of one pair") {
  HybridText t = text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np ALICE) (o (v HATES) (np BOB))))"
      "(link regular fuse-subject (0 0) (1 0))"
      "(link regular fuse-object (0 1) (1 1))");
  ValidationReport report = check_fusion_order(t);
  CHECK(report.has(ErrorCode::UngrammaticalFusion));
}

TEST_CASE("check_fusion_order accepts either single fusion") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np ALICE) (o (v HATES) (np BOB))))"
      "(link regular fuse-subject (0 0) (1 0))"
      "(link regular (0 1) (1 1))");
  CHECK(check_fusion_order(t).ok());

  HybridText t2 = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np ALICE) (o (v HATES) (np BOB))))"
      "(link regular (0 0) (1 0))"
      "(link regular fuse-object (0 1) (1 1))");
  CHECK(check_fusion_order(t2).ok());
}

TEST_CASE("reflexive after fusion is ungrammatical, before is fine") {
  // Reflexive introduced first (inside one simple sentence), then fused:
  // one chain covers subject, object and the second sentence's subject.
  HybridText before = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np ALICE))))"
      "(s (iv (np ALICE) (v DRINKS)))"
      "(link regular (0 0) (0 1) (1 0))");
  HybridText fused = fuse_subject_relative_special(before, before.links[0]);
  CHECK(validate(fused).ok());
  CHECK(check_fusion_order(fused).ok());

  // The reverse order: a reflexive pronoun spanning two constituents of the
  // fused sentence.
  HybridText after = text_of(
      "(s (who! (np ALICE) (tv (who) (o (v LIKES) (np ALICE))) (iv (blank) (v DRINKS))))"
      "(link regular (0 0) (0 1) (0 3))"
      "(link reflexive (0 0) (0 2))");
  ValidationReport report = check_fusion_order(after);
  CHECK(report.has(ErrorCode::UngrammaticalFusion));
}

TEST_CASE("pronoun surface table renders SHE for subjects and HIM otherwise") {
  HybridText t = valid_text_of(
      "(s (tv (np ALICE) (o (v LIKES) (np BOB))))"
      "(s (tv (np ALICE) (o (v HATES) (np BOB))))"
      "(link regular (0 0) (1 0))"
      "(link regular (0 1) (1 1))");
  HybridText with_pron = t;
  // Replace the later occurrences with plain pronouns.
  with_pron.items[1].kids[0] = DNode(Head::Pron);
  with_pron.items[1].kids[1].kids[1] = DNode(Head::Pron);
  CHECK(validate(with_pron).ok());
  CHECK(yield_text(with_pron) == "ALICE LIKES BOB. SHE HATES HIM");
}
