#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refcheck/bibtex.hpp"
#include "refcheck/record.hpp"

namespace refcheck {

enum class IssueCode {
  TitleMismatch,
  AuthorMismatch,
  JournalDiscrepancy,
  YearMismatch,
  FakeAuthor,
  NotFound,
};

// Stable token for reports, e.g. "TitleMismatch".
std::string_view issue_code_name(IssueCode code);

struct Issue {
  IssueCode code;
  std::string detail;
  int penalty;  // one of -10, -15, -20, fixed at creation time
};

// Per-candidate component similarities plus detected issues.  All four
// scores live on the 0-100 scale.
struct MatchEvaluation {
  double s_title = 0.0;
  double s_author = 0.0;
  double s_journal = 0.0;
  double s_year = 0.0;
  std::vector<std::string> matched_authors;     // normalized family names
  std::vector<std::string> fake_author_tokens;  // display-form query tokens
  std::vector<Issue> issues;
};

// One family name per author string: the part before the first comma when a
// comma is present, otherwise the last whitespace-separated token; each
// result is normalize()d ("van der Berg, A." -> "vanderberg").
std::vector<std::string> extract_family_names(const std::vector<std::string>& authors);

// score = 100 * |matched| / |family_names| where a family name matches iff
// it occurs as a substring of normalize(query_text).  An empty family list
// scores 100 with no matches (no evidence against the query).
std::pair<double, std::vector<std::string>> author_similarity(
    std::string_view query_text, const std::vector<std::string>& family_names);

// Capitalized alphabetic tokens (>= 3 letters) from the query's author
// region (whole raw text for free-text queries) whose normalized form
// matches none of: the candidate title, venue, year digits, any candidate
// author family name (substring containment either way), any word of a
// candidate given name (full equality, or first-letter match against a
// one-letter word, i.e. an initial), or the citation-boilerplate
// exclusion list.
std::vector<std::string> detect_fake_authors(const Reference& query,
                                             const CandidateRecord& candidate);

// 100 if equal, 50 on a one-year difference (preprint/print drift), else 0;
// 100 when either side is absent.
double year_similarity(std::optional<int> query_year,
                       std::optional<int> candidate_year);

// Component scores of one candidate against the query: title via plain
// similarity for structured queries with a title, best-window containment
// against the raw text otherwise; author via author_similarity over the
// query's author region; journal via venue similarity (100 if either side
// absent); year via year_similarity.  Fills fake_author_tokens; leaves
// `issues` empty (see detect_issues).
MatchEvaluation evaluate_single(const Reference& query,
                                const CandidateRecord& candidate);

// Evaluates every candidate and picks the argmax of the pre-penalty
// confidence; ties broken by higher s_title, then earlier source rank, then
// earlier list order.  Throws std::invalid_argument on an empty list.
std::pair<CandidateRecord, MatchEvaluation> evaluate_candidates(
    const Reference& query, const std::vector<CandidateRecord>& candidates);

// Threshold rules: TitleMismatch iff s_title < 80 (-20); AuthorMismatch iff
// s_author < 90 (-20); JournalDiscrepancy iff both venues present and
// s_journal < 80 (-20 when s_journal < 50, else -10); YearMismatch iff both
// years present and s_year < 100 (-10 on a one-year drift, else -15); one
// FakeAuthor issue (-10 initially) per fake author token.
std::vector<Issue> detect_issues(const Reference& query,
                                 const CandidateRecord& best,
                                 const MatchEvaluation& eval);

}  // namespace refcheck
