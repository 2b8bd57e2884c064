#include <sstream>

#include "textcirc/grammar_ops.hpp"

namespace textcirc {

std::string yield_item(const Derivation& item) {
  std::ostringstream out;
  bool first = true;
  for (const auto& token : yield_pieces(item)) {
    if (!first) out << ' ';
    first = false;
    out << token;
  }
  return out.str();
}

std::string yield_text(const HybridText& text) {
  std::ostringstream out;
  bool first = true;
  for (const auto& item : text.items) {
    if (!first) out << ". ";
    first = false;
    out << yield_item(item);
  }
  return out.str();
}

}  // namespace textcirc
