#pragma once

#include <string>

#include "doctest.h"
#include "textcirc/grammar_ops.hpp"
#include "textcirc/hgt_io.hpp"

namespace textcirc::testing {

// Parses the items/links of an .hgt snippet against the demo lexicon.
inline HybridText text_of(const std::string& body) {
  HgtParseResult parsed = parse_hgt("(text " + body + ")");
  REQUIRE_MESSAGE(parsed.ok(), parsed.report.to_string());
  parsed.text.lexicon = demo_lexicon();
  return parsed.text;
}

inline HybridText valid_text_of(const std::string& body) {
  HybridText text = text_of(body);
  ValidationReport report = validate(text);
  REQUIRE_MESSAGE(report.ok(), report.to_string());
  return text;
}

}  // namespace textcirc::testing
