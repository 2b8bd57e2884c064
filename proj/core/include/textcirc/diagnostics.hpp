#pragma once

#include <string>
#include <vector>

namespace textcirc {

// Every validator in the library reports through this type instead of
// throwing: a report is empty iff the value checked is well-formed.
enum class ErrorCode {
  // grammar
  UnknownToken,
  RuleMismatch,
  BadLink,
  ScopeViolation,
  UngrammaticalFusion,
  PreconditionViolation,
  EmptyLexiconClass,
  ParseError,
  // diagram
  TypeMismatch,
  ScopeLeak,
  UnbalancedNP,
  // rewrite
  CyclicLink,
  // circuit
  WireOrderViolation,
  CycleDetected,
  DuplicateArg,
  ReferentClash,
  // extensions
  UnknownPassiveForm,
  DanglingPossessive,
};

const char* error_code_name(ErrorCode code);

struct Diagnostic {
  ErrorCode code;
  std::string message;
  // Best-effort location: item index and noun-occurrence index where that
  // makes sense, -1 otherwise.
  int item = -1;
  int occurrence = -1;
};

class ValidationReport {
public:
  bool ok() const { return entries_.empty(); }
  const std::vector<Diagnostic>& entries() const { return entries_; }

  void add(ErrorCode code, std::string message, int item = -1, int occurrence = -1) {
    entries_.push_back(Diagnostic{code, std::move(message), item, occurrence});
  }
  void merge(const ValidationReport& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }
  bool has(ErrorCode code) const {
    for (const auto& e : entries_)
      if (e.code == code) return true;
    return false;
  }
  std::string to_string() const;

private:
  std::vector<Diagnostic> entries_;
};

// Thrown only on API misuse (caller ignored a failed report); never used for
// input validation itself.
struct PreconditionError : std::exception {
  explicit PreconditionError(std::string what) : what_(std::move(what)) {}
  const char* what() const noexcept override { return what_.c_str(); }
  std::string what_;
};

}  // namespace textcirc
