#include "refcheck/similarity.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "refcheck/unicode.hpp"

namespace refcheck {

namespace {

std::size_t lev_impl(std::u32string_view a, std::u32string_view b) {
  // Shared prefixes and suffixes never contribute edits; trimming them keeps
  // the DP small for near-identical inputs.
  std::size_t lo = 0;
  while (lo < a.size() && lo < b.size() && a[lo] == b[lo]) ++lo;
  std::size_t hi = 0;
  while (lo + hi < a.size() && lo + hi < b.size() &&
         a[a.size() - 1 - hi] == b[b.size() - 1 - hi]) {
    ++hi;
  }
  a = a.substr(lo, a.size() - lo - hi);
  b = b.substr(lo, b.size() - lo - hi);
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();

  // Keep the row buffer on the shorter string.
  const std::u32string_view outer = a.size() >= b.size() ? a : b;
  const std::u32string_view inner = a.size() >= b.size() ? b : a;

  std::vector<std::size_t> row(inner.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= outer.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t subst =
          diag + (outer[i - 1] == inner[j - 1] ? 0 : 1);
      row[j] = std::min({subst, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[inner.size()];
}

std::size_t window_impl(std::u32string_view text, std::u32string_view pattern) {
  if (pattern.empty()) return 0;
  if (text.empty()) return pattern.size();

  // Row 0 is all zeros: a match window may open at any position of `text`.
  std::vector<std::size_t> row(text.size() + 1, 0);
  for (std::size_t i = 1; i <= pattern.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= text.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t subst =
          diag + (pattern[i - 1] == text[j - 1] ? 0 : 1);
      row[j] = std::min({subst, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  // The window may close anywhere: take the cheapest cell of the final row.
  return *std::min_element(row.begin(), row.end());
}

}  // namespace

std::string normalize(std::string_view s) {
  const std::u32string cps = unicode::decode_utf8(s);
  std::string out;
  out.reserve(s.size());
  for (const char32_t cp : cps) {
    const char32_t folded = unicode::fold_case(cp);
    if (unicode::is_word_char(folded)) unicode::append_utf8(out, folded);
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return lev_impl(unicode::decode_utf8(a), unicode::decode_utf8(b));
}

double similarity(std::string_view a, std::string_view b) {
  const std::u32string ua = unicode::decode_utf8(a);
  const std::u32string ub = unicode::decode_utf8(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 100.0;
  const std::size_t dist = lev_impl(ua, ub);
  return 100.0 * (1.0 - static_cast<double>(dist) / static_cast<double>(longest));
}

std::size_t window_distance(std::string_view text, std::string_view pattern) {
  return window_impl(unicode::decode_utf8(text), unicode::decode_utf8(pattern));
}

double containment_similarity(std::string_view text, std::string_view pattern) {
  const std::u32string upat = unicode::decode_utf8(pattern);
  if (upat.empty()) return 100.0;
  const std::size_t dist = window_impl(unicode::decode_utf8(text), upat);
  const double score =
      100.0 * (1.0 - static_cast<double>(dist) / static_cast<double>(upat.size()));
  return std::clamp(score, 0.0, 100.0);
}

}  // namespace refcheck
