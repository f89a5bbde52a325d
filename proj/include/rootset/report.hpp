#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rootset {

enum class CheckStatus { pass, fail, hypothesis_failed };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::hypothesis_failed: return "hypothesis-failed";
  }
  return "unknown";
}

/// Outcome of one exhaustive check. `witness` holds the first counterexample (or the
/// failed hypothesis) in element names.
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::size_t checked = 0;
  std::optional<std::string> witness;
  std::string detail;

  bool passed() const { return status == CheckStatus::pass; }
};

struct LemmaReport {
  std::string lemma;
  std::vector<CheckResult> clauses;

  bool passed() const {
    for (const auto& c : clauses)
      if (c.status == CheckStatus::fail) return false;
    return true;
  }
};

}  // namespace rootset
