#include "textcirc/lexicon.hpp"

#include <array>
#include <sstream>

namespace textcirc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::RuleMismatch: return "RuleMismatch";
    case ErrorCode::BadLink: return "BadLink";
    case ErrorCode::ScopeViolation: return "ScopeViolation";
    case ErrorCode::UngrammaticalFusion: return "UngrammaticalFusion";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::EmptyLexiconClass: return "EmptyLexiconClass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::ScopeLeak: return "ScopeLeak";
    case ErrorCode::UnbalancedNP: return "UnbalancedNP";
    case ErrorCode::CyclicLink: return "CyclicLink";
    case ErrorCode::WireOrderViolation: return "WireOrderViolation";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DuplicateArg: return "DuplicateArg";
    case ErrorCode::ReferentClash: return "ReferentClash";
    case ErrorCode::UnknownPassiveForm: return "UnknownPassiveForm";
    case ErrorCode::DanglingPossessive: return "DanglingPossessive";
  }
  return "?";
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& e : entries_) {
    out << error_code_name(e.code);
    if (e.item >= 0) {
      out << " [item " << e.item;
      if (e.occurrence >= 0) out << ", occurrence " << e.occurrence;
      out << "]";
    }
    out << ": " << e.message << "\n";
  }
  return out.str();
}

const char* word_class_name(WordClass c) {
  switch (c) {
    case WordClass::N: return "n";
    case WordClass::IV: return "iv";
    case WordClass::TV: return "tv";
    case WordClass::ADJ: return "adj";
    case WordClass::ADV: return "adv";
    case WordClass::ADP: return "adp";
    case WordClass::SCV: return "scv";
    case WordClass::CNJ: return "cnj";
  }
  return "?";
}

std::optional<WordClass> word_class_from_name(const std::string& name) {
  static const std::array<std::pair<const char*, WordClass>, 8> table = {{
      {"n", WordClass::N},
      {"iv", WordClass::IV},
      {"tv", WordClass::TV},
      {"adj", WordClass::ADJ},
      {"adv", WordClass::ADV},
      {"adp", WordClass::ADP},
      {"scv", WordClass::SCV},
      {"cnj", WordClass::CNJ},
  }};
  for (const auto& [n, c] : table)
    if (name == n) return c;
  return std::nullopt;
}

Lexicon::Lexicon() {
  entries_[kExists] = WordClass::IV;
  entries_[kOwns] = WordClass::TV;
}

bool Lexicon::reserved(const std::string& token) {
  static const std::array<const char*, 11> words = {
      "IS", "WHO", "THAT", "BY", "HIM", "SHE", "HIS",
      "[&]", "[THAT]", "!", "␣"};
  for (const char* w : words)
    if (token == w) return true;
  return false;
}

ValidationReport Lexicon::add(const std::string& token, WordClass cls) {
  ValidationReport report;
  if (token.empty()) {
    report.add(ErrorCode::UnknownToken, "empty token");
    return report;
  }
  if (reserved(token)) {
    report.add(ErrorCode::UnknownToken, "'" + token + "' is a reserved surface word");
    return report;
  }
  auto it = entries_.find(token);
  if (it != entries_.end() && it->second != cls) {
    report.add(ErrorCode::UnknownToken,
               "'" + token + "' already registered as " + word_class_name(it->second));
    return report;
  }
  entries_[token] = cls;
  return report;
}

ValidationReport Lexicon::add_passive(const std::string& tv_token, const std::string& participle) {
  ValidationReport report;
  if (!is(tv_token, WordClass::TV)) {
    report.add(ErrorCode::UnknownToken, "passive form for non-TV token '" + tv_token + "'");
    return report;
  }
  passive_[tv_token] = participle;
  active_[participle] = tv_token;
  return report;
}

std::optional<WordClass> Lexicon::find(const std::string& token) const {
  auto it = entries_.find(token);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool Lexicon::is(const std::string& token, WordClass cls) const {
  auto c = find(token);
  return c.has_value() && *c == cls;
}

std::optional<std::string> Lexicon::passive_of(const std::string& tv_token) const {
  auto it = passive_.find(tv_token);
  if (it == passive_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Lexicon::active_of(const std::string& participle) const {
  auto it = active_.find(participle);
  if (it == active_.end()) return std::nullopt;
  return it->second;
}

std::size_t Lexicon::count(WordClass cls) const {
  std::size_t n = 0;
  for (const auto& [tok, c] : entries_) {
    (void)tok;
    if (c == cls) ++n;
  }
  return n;
}

}  // namespace textcirc
