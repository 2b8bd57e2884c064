#pragma once

#include <iosfwd>
#include <string>

#include "textcirc/text.hpp"

namespace textcirc {

// .hgt files are UTF-8 s-expressions; the grammar is documented in
// docs/formats.md.  parse_hgt reports syntax and arity problems only; rule
// conformance is validate()'s job.
struct HgtParseResult {
  HybridText text;
  ValidationReport report;
  bool ok() const { return report.ok(); }
};

HgtParseResult parse_hgt(const std::string& source);
HgtParseResult parse_hgt_file(const std::string& path);

// Deterministic pretty-printer; parse_hgt(print_hgt(t)) reproduces t and
// re-printing is byte-stable.
std::string print_hgt(const HybridText& text);

std::string print_derivation(const Derivation& item);

}  // namespace textcirc
