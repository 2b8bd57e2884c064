#pragma once

#include <map>
#include <optional>
#include <string>

#include "textcirc/diagnostics.hpp"

namespace textcirc {

enum class WordClass { N, IV, TV, ADJ, ADV, ADP, SCV, CNJ };

const char* word_class_name(WordClass c);
std::optional<WordClass> word_class_from_name(const std::string& name);

// Maps every word token to exactly one class.  Homonyms must be
// disambiguated upstream with suffixed ids (RUNS.1, RUNS.2).  Two verbs are
// built in: EXISTS (intransitive, used when a noun wire touches no other
// gate) and OWNS (transitive, target of the possessive-pronoun reduction).
class Lexicon {
public:
  Lexicon();

  // Fails with UnknownToken on re-registration under a different class and
  // on reserved surface words (IS, WHO, THAT, ...).
  ValidationReport add(const std::string& token, WordClass cls);
  // passive_form is defined only on TV tokens.
  ValidationReport add_passive(const std::string& tv_token, const std::string& participle);

  std::optional<WordClass> find(const std::string& token) const;
  bool is(const std::string& token, WordClass cls) const;
  std::optional<std::string> passive_of(const std::string& tv_token) const;
  std::optional<std::string> active_of(const std::string& participle) const;

  const std::map<std::string, WordClass>& entries() const { return entries_; }
  const std::map<std::string, std::string>& passive_forms() const { return passive_; }

  std::size_t count(WordClass cls) const;
  static bool reserved(const std::string& token);

  static constexpr const char* kExists = "EXISTS";
  static constexpr const char* kOwns = "OWNS";

private:
  std::map<std::string, WordClass> entries_;
  std::map<std::string, std::string> passive_;  // TV token -> participle
  std::map<std::string, std::string> active_;   // participle -> TV token
};

}  // namespace textcirc
