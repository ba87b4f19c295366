#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refcheck/record.hpp"

namespace refcheck {

// A parsed input citation to be verified: either free text, or structured
// fields extracted from a BibTeX entry.  `raw_text` holds the original input
// unit after LaTeX filtering and is always non-empty.
struct Reference {
  std::string raw_text;
  std::optional<std::string> entry_type;
  std::optional<std::string> title;
  std::vector<std::string> authors;  // empty = absent
  std::optional<std::string> journal_or_venue;
  std::optional<int> year;           // in [1000, 2999] when present
  std::optional<std::string> doi;
  std::optional<std::string> volume;
  std::optional<std::string> number;
  std::optional<std::string> pages;
  std::optional<std::string> publisher;
  // Raw parsed field map, kept as the expected-metadata side channel for
  // structured entries.
  std::map<std::string, std::string> expected_metadata;

  bool structured() const { return entry_type.has_value(); }
};

enum class InputKind { BibTeX, FreeTextSingle, FreeTextList };

// BibTeX iff the text contains `@<letters>{` at the start of some line
// (leading whitespace tolerated); else FreeTextList iff >= 2 non-empty
// lines; else FreeTextSingle.  Throws std::invalid_argument on blank input.
InputKind detect_input_kind(std::string_view text);

struct ParseResult {
  std::vector<Reference> references;
  std::vector<std::string> warnings;  // one entry per skipped/ill-formed block
};

// Parses `@type{key, field = value, ...}` blocks.  Values may be brace- or
// quote-delimited or bare numbers; `#` concatenation is tolerated by
// joining the pieces.  Field values are LaTeX-filtered; the author field is
// split on the token " and ".  Unparseable blocks are skipped and reported
// via warnings, never fatally.  Zero parsed references with non-empty
// warnings signals a no-valid-entries condition to the caller.
ParseResult parse_bibtex(std::string_view text);

// Splits raw input into one string per top-level `@` entry, used to keep the
// original source text of each entry alongside its parsed form.
std::vector<std::string> split_bibtex_entries(std::string_view text);

// Citation key per the scheme: lowercase ASCII family name of the first
// author + year digits + first title word longer than 3 letters (stopwords
// excluded; falls back to the first title word, then to nothing).
// Author-less records use "unknown".  Result always matches [a-z0-9]+.
std::string generate_citation_key(const CandidateRecord& record);

// Hands out batch-unique keys: the first use of a key is returned as-is,
// collisions get deterministic suffixes "a", "b", ..., "z", "aa", ...
class CitationKeyAllocator {
 public:
  std::string allocate(const CandidateRecord& record);

 private:
  std::map<std::string, int> used_;
};

// Serializes one entry with fields in the fixed order: title, author,
// journal/booktitle, year, volume, number, pages, doi; 2-space indentation,
// brace-delimited values, no trailing comma.  Entry type is mapped from the
// record type (journal-article -> article, proceedings-article ->
// inproceedings, book -> book, else misc; inproceedings uses booktitle).
// Throws std::invalid_argument when the record has no title.
std::string generate_bibtex(const CandidateRecord& record, const std::string& key);

}  // namespace refcheck
