#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace refcheck {

// Lowercases (simple case folding) and removes every character that is not a
// letter or digit.  The result therefore contains no whitespace or
// punctuation: "Attention Is All You Need!" -> "attentionisallyouneed".
std::string normalize(std::string_view s);

// Levenshtein edit distance counted over Unicode scalar values, not bytes.
// Invalid UTF-8 bytes each decode to U+FFFD and are compared as such.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Normalized similarity on a 0-100 scale:
//   100 * (1 - levenshtein(a, b) / max(|a|, |b|))
// where |s| counts Unicode scalar values.  Both inputs empty -> 100.
// Callers are expected to pass normalize()d strings.
double similarity(std::string_view a, std::string_view b);

// Minimum edit distance between `pattern` and any contiguous substring of
// `text` (semi-global alignment: the match may start and end anywhere in
// `text`, edits are charged against `pattern` only).
std::size_t window_distance(std::string_view text, std::string_view pattern);

// How well `pattern` occurs somewhere inside `text`, on a 0-100 scale:
//   100 * (1 - window_distance(text, pattern) / |pattern|)
// An empty pattern is vacuously contained (100).  Used for matching a known
// title against a longer free-text citation string.
double containment_similarity(std::string_view text, std::string_view pattern);

}  // namespace refcheck
