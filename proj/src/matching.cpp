#include "refcheck/matching.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "refcheck/scoring.hpp"
#include "refcheck/similarity.hpp"
#include "refcheck/unicode.hpp"

namespace refcheck {

namespace {

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

const std::set<std::string>& boilerplate_tokens() {
  static const std::set<std::string> tokens = {
      "in",        "the",      "proceedings", "journal",  "press",
      "university", "vol",     "no",          "ed",       "eds",
      "et",        "al",       "january",     "february", "march",
      "april",     "may",      "june",        "july",     "august",
      "september", "october",  "november",    "december"};
  return tokens;
}

bool is_letter(char32_t cp) {
  if (cp >= U'0' && cp <= U'9') return false;
  return unicode::is_word_char(cp);
}

// The text whose capitalized tokens are candidate fabricated-author names:
// the author field for structured queries that have one, the whole raw text
// otherwise.
std::string author_region(const Reference& query) {
  if (query.structured() && !query.authors.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < query.authors.size(); ++i) {
      if (i > 0) joined += " and ";
      joined += query.authors[i];
    }
    return joined;
  }
  return query.raw_text;
}

std::string family_from_author_string(std::string_view author) {
  const std::size_t comma = author.find(',');
  if (comma != std::string_view::npos) {
    return std::string(author.substr(0, comma));
  }
  // Last whitespace-separated token.
  std::size_t end = author.size();
  while (end > 0 && (author[end - 1] == ' ' || author[end - 1] == '\t')) --end;
  std::size_t begin = end;
  while (begin > 0 && author[begin - 1] != ' ' && author[begin - 1] != '\t') {
    --begin;
  }
  return std::string(author.substr(begin, end - begin));
}

std::vector<std::string> candidate_family_norms(const CandidateRecord& candidate) {
  std::vector<std::string> fams;
  fams.reserve(candidate.authors.size());
  for (const Author& a : candidate.authors) fams.push_back(normalize(a.family));
  return fams;
}

}  // namespace

std::string_view issue_code_name(IssueCode code) {
  switch (code) {
    case IssueCode::TitleMismatch:
      return "TitleMismatch";
    case IssueCode::AuthorMismatch:
      return "AuthorMismatch";
    case IssueCode::JournalDiscrepancy:
      return "JournalDiscrepancy";
    case IssueCode::YearMismatch:
      return "YearMismatch";
    case IssueCode::FakeAuthor:
      return "FakeAuthor";
    case IssueCode::NotFound:
      return "NotFound";
  }
  return "NotFound";
}

std::vector<std::string> extract_family_names(
    const std::vector<std::string>& authors) {
  std::vector<std::string> names;
  names.reserve(authors.size());
  for (const std::string& author : authors) {
    names.push_back(normalize(family_from_author_string(author)));
  }
  return names;
}

std::pair<double, std::vector<std::string>> author_similarity(
    std::string_view query_text, const std::vector<std::string>& family_names) {
  if (family_names.empty()) return {100.0, {}};
  const std::string query_norm = normalize(query_text);
  std::vector<std::string> matched;
  std::size_t matched_count = 0;
  for (const std::string& family : family_names) {
    if (family.empty()) {
      // Nothing to look for: counts as matched, but is not listed.
      ++matched_count;
      continue;
    }
    if (contains(query_norm, family)) {
      ++matched_count;
      matched.push_back(family);
    }
  }
  const double score = 100.0 * static_cast<double>(matched_count) /
                       static_cast<double>(family_names.size());
  return {score, std::move(matched)};
}

std::vector<std::string> detect_fake_authors(const Reference& query,
                                             const CandidateRecord& candidate) {
  const std::string region = author_region(query);
  const std::u32string cps = unicode::decode_utf8(region);

  const std::string title_norm = normalize(candidate.title);
  const std::string venue_norm =
      candidate.venue ? normalize(*candidate.venue) : std::string();
  const std::string year_digits =
      candidate.year ? std::to_string(*candidate.year) : std::string();
  const std::vector<std::string> family_norms = candidate_family_norms(candidate);
  // Normalized letter-run words of every candidate given name, so that
  // "Aidan N." contributes {"aidan", "n"}.
  std::vector<std::string> given_word_norms;
  for (const Author& a : candidate.authors) {
    const std::u32string given_cps = unicode::decode_utf8(a.given);
    std::size_t j = 0;
    while (j < given_cps.size()) {
      if (!is_letter(given_cps[j])) {
        ++j;
        continue;
      }
      std::string word;
      while (j < given_cps.size() && is_letter(given_cps[j])) {
        unicode::append_utf8(word, unicode::fold_case(given_cps[j]));
        ++j;
      }
      given_word_norms.push_back(std::move(word));
    }
  }

  std::vector<std::string> fakes;
  std::set<std::string> seen;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_letter(cps[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < cps.size() && is_letter(cps[i])) ++i;
    const std::size_t length = i - begin;
    if (length < 3) continue;
    if (!unicode::is_upper(cps[begin])) continue;

    std::string display;
    std::string norm;
    for (std::size_t k = begin; k < i; ++k) {
      unicode::append_utf8(display, cps[k]);
      unicode::append_utf8(norm, unicode::fold_case(cps[k]));
    }
    if (seen.count(norm) != 0) continue;

    bool cleared = boilerplate_tokens().count(norm) != 0;
    if (!cleared && contains(title_norm, norm)) cleared = true;
    if (!cleared && !venue_norm.empty() && contains(venue_norm, norm)) {
      cleared = true;
    }
    if (!cleared && !year_digits.empty() && contains(year_digits, norm)) {
      cleared = true;
    }
    if (!cleared) {
      for (const std::string& family : family_norms) {
        if (family.empty()) continue;
        if (contains(family, norm) || contains(norm, family)) {
          cleared = true;
          break;
        }
      }
    }
    if (!cleared) {
      for (const std::string& word : given_word_norms) {
        if (norm == word) {
          cleared = true;
          break;
        }
        // A single-letter word is an initial; it can only vouch for the
        // first letter.
        if (word.size() == 1 && norm.front() == word.front()) {
          cleared = true;
          break;
        }
      }
    }
    if (!cleared) {
      seen.insert(norm);
      fakes.push_back(display);
    }
  }
  return fakes;
}

double year_similarity(std::optional<int> query_year,
                       std::optional<int> candidate_year) {
  if (!query_year || !candidate_year) return 100.0;
  const int diff = std::abs(*query_year - *candidate_year);
  if (diff == 0) return 100.0;
  if (diff == 1) return 50.0;
  return 0.0;
}

MatchEvaluation evaluate_single(const Reference& query,
                                const CandidateRecord& candidate) {
  MatchEvaluation eval;

  const std::string candidate_title_norm = normalize(candidate.title);
  if (query.title) {
    eval.s_title = similarity(normalize(*query.title), candidate_title_norm);
  } else {
    // Free-text queries embed the title inside a longer citation string;
    // judge containment rather than whole-string distance.
    eval.s_title =
        containment_similarity(normalize(query.raw_text), candidate_title_norm);
  }

  std::string author_text = author_region(query);
  auto [author_score, matched] =
      author_similarity(author_text, candidate_family_norms(candidate));
  eval.s_author = author_score;
  eval.matched_authors = std::move(matched);

  if (query.journal_or_venue && candidate.venue) {
    eval.s_journal =
        similarity(normalize(*query.journal_or_venue), normalize(*candidate.venue));
  } else {
    eval.s_journal = 100.0;
  }

  eval.s_year = year_similarity(query.year, candidate.year);
  eval.fake_author_tokens = detect_fake_authors(query, candidate);
  return eval;
}

std::pair<CandidateRecord, MatchEvaluation> evaluate_candidates(
    const Reference& query, const std::vector<CandidateRecord>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("candidate set is empty");
  }
  std::size_t best_index = 0;
  MatchEvaluation best_eval;
  double best_confidence = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    MatchEvaluation eval = evaluate_single(query, candidates[i]);
    const double confidence = base_confidence(eval, query.structured());
    bool better = false;
    if (confidence > best_confidence) {
      better = true;
    } else if (confidence == best_confidence) {
      if (eval.s_title > best_eval.s_title) {
        better = true;
      } else if (eval.s_title == best_eval.s_title &&
                 source_rank(candidates[i].source) <
                     source_rank(candidates[best_index].source)) {
        better = true;
      }
    }
    if (better || i == 0) {
      best_index = i;
      best_eval = std::move(eval);
      best_confidence = confidence;
    }
  }
  return {candidates[best_index], std::move(best_eval)};
}

std::vector<Issue> detect_issues(const Reference& query,
                                 const CandidateRecord& best,
                                 const MatchEvaluation& eval) {
  std::vector<Issue> issues;
  if (eval.s_title < 80.0) {
    issues.push_back({IssueCode::TitleMismatch,
                      "title similarity " + format_score(eval.s_title) +
                          " is below 80 against '" + best.title + "'",
                      -20});
  }
  if (eval.s_author < 90.0) {
    issues.push_back({IssueCode::AuthorMismatch,
                      "author similarity " + format_score(eval.s_author) +
                          " is below 90",
                      -20});
  }
  if (query.journal_or_venue && best.venue && eval.s_journal < 80.0) {
    const int penalty = eval.s_journal < 50.0 ? -20 : -10;
    issues.push_back({IssueCode::JournalDiscrepancy,
                      "venue '" + *query.journal_or_venue + "' vs '" +
                          *best.venue + "' (similarity " +
                          format_score(eval.s_journal) + ")",
                      penalty});
  }
  if (query.year && best.year && eval.s_year < 100.0) {
    const int penalty = std::abs(*query.year - *best.year) == 1 ? -10 : -15;
    issues.push_back({IssueCode::YearMismatch,
                      "year " + std::to_string(*query.year) + " vs " +
                          std::to_string(*best.year),
                      penalty});
  }
  for (const std::string& token : eval.fake_author_tokens) {
    issues.push_back({IssueCode::FakeAuthor,
                      "author token '" + token +
                          "' matches no title word, venue, year, or known author",
                      -10});
  }
  return issues;
}

}  // namespace refcheck
