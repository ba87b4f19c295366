#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refcheck/matching.hpp"

namespace refcheck {

enum class Verdict { Verified, PartialMatch, NotFound };

// Stable machine token: "verified", "partial_match", "not_found".
std::string_view verdict_key(Verdict verdict);
// Display form: "VERIFIED", "PARTIAL MATCH", "NOT FOUND".
std::string_view verdict_label(Verdict verdict);

// Composite confidence with its full provenance.
struct Confidence {
  double value = 0.0;        // clamp(pre_penalty + bonus + sum(penalties), 0, 100)
  double pre_penalty = 0.0;  // base confidence before penalties/bonus
  double bonus_applied = 0.0;
  std::vector<std::pair<Issue, int>> penalties_applied;
};

// Branching:
//  (a) structured input and min(all four scores) >= 80 -> four-way average;
//  (b) else if s_title > 80 and s_author < 90 ->
//        s_title - 0.5 * (100 - s_author);
//  (c) else the four-way average as the general fallback.
double base_confidence(const MatchEvaluation& eval, bool structured);

// Adds each issue's (negative) penalty to the base, clamping below at 0.
double apply_penalties(double base, const std::vector<Issue>& issues);

// 10 when at least two authors were confirmed by cross-validation, else 0.
double multi_source_bonus(const std::set<std::string>& confirmed_authors);

// NotFound when no candidates were found or confidence <= 50; Verified when
// confidence > 80; PartialMatch otherwise.
Verdict classify(double confidence, bool candidates_found);

// Assembles the full Confidence record from its parts.
Confidence assemble_confidence(double base, double bonus,
                               const std::vector<Issue>& issues);

}  // namespace refcheck
