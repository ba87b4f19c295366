#include "refcheck/scoring.hpp"

#include <algorithm>

namespace refcheck {

std::string_view verdict_key(Verdict verdict) {
  switch (verdict) {
    case Verdict::Verified:
      return "verified";
    case Verdict::PartialMatch:
      return "partial_match";
    case Verdict::NotFound:
      return "not_found";
  }
  return "not_found";
}

std::string_view verdict_label(Verdict verdict) {
  switch (verdict) {
    case Verdict::Verified:
      return "VERIFIED";
    case Verdict::PartialMatch:
      return "PARTIAL MATCH";
    case Verdict::NotFound:
      return "NOT FOUND";
  }
  return "NOT FOUND";
}

double base_confidence(const MatchEvaluation& eval, bool structured) {
  const double lowest =
      std::min(std::min(eval.s_title, eval.s_author),
               std::min(eval.s_journal, eval.s_year));
  const double average =
      (eval.s_title + eval.s_author + eval.s_journal + eval.s_year) / 4.0;
  if (structured && lowest >= 80.0) return average;
  if (eval.s_title > 80.0 && eval.s_author < 90.0) {
    return eval.s_title - 0.5 * (100.0 - eval.s_author);
  }
  return average;
}

double apply_penalties(double base, const std::vector<Issue>& issues) {
  double value = base;
  for (const Issue& issue : issues) value += issue.penalty;
  return std::max(value, 0.0);
}

double multi_source_bonus(const std::set<std::string>& confirmed_authors) {
  return confirmed_authors.size() >= 2 ? 10.0 : 0.0;
}

Verdict classify(double confidence, bool candidates_found) {
  if (!candidates_found || confidence <= 50.0) return Verdict::NotFound;
  if (confidence > 80.0) return Verdict::Verified;
  return Verdict::PartialMatch;
}

Confidence assemble_confidence(double base, double bonus,
                               const std::vector<Issue>& issues) {
  Confidence confidence;
  confidence.pre_penalty = base;
  confidence.bonus_applied = bonus;
  double total = base + bonus;
  for (const Issue& issue : issues) {
    confidence.penalties_applied.emplace_back(issue, issue.penalty);
    total += issue.penalty;
  }
  confidence.value = std::clamp(total, 0.0, 100.0);
  return confidence;
}

}  // namespace refcheck
