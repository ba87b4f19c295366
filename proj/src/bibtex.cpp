#include "refcheck/bibtex.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "refcheck/latex_filter.hpp"
#include "refcheck/unicode.hpp"

namespace refcheck {

namespace {

bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Field values use braces as grouping markers ("{BERT}: ..." protects
// capitalization); they are never literal content unless escaped.
std::string strip_protective_braces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    if ((c == '{' || c == '}') && (out.empty() || out.back() != '\\')) {
      continue;
    }
    out.push_back(c);
  }
  return out;
}

// True when a line begins (after optional whitespace) with `@<letters>{`.
// `@<letters>(` is accepted too; parentheses-delimited entries exist in the
// wild even though braces dominate.
bool line_starts_entry(std::string_view line) {
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string_view::npos || line[i] != '@') return false;
  ++i;
  std::size_t letters = 0;
  while (i < line.size() && is_ascii_alpha(line[i])) {
    ++i;
    ++letters;
  }
  if (letters == 0) return false;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i < line.size() && (line[i] == '{' || line[i] == '(');
}

// Iterate the input line by line, calling fn(line_start, line_view).
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    fn(pos, text.substr(pos, end - pos));
    if (end == text.size()) break;
    pos = end + 1;
  }
}

// ASCII-only lowercase alphanumeric slug used for citation keys; diacritics
// transliterated, everything unmappable dropped.
std::string ascii_slug(std::string_view s) {
  std::string out;
  for (const char32_t cp : unicode::decode_utf8(s)) {
    const char32_t folded = unicode::fold_case(cp);
    if ((folded >= 'a' && folded <= 'z') || (folded >= '0' && folded <= '9')) {
      out.push_back(static_cast<char>(folded));
      continue;
    }
    if (const char* mapped = unicode::ascii_transliteration(folded)) {
      for (const char* p = mapped; *p; ++p) {
        if ((*p >= 'a' && *p <= 'z') || (*p >= '0' && *p <= '9')) {
          out.push_back(*p);
        }
      }
    }
  }
  return out;
}

const std::set<std::string>& key_stopwords() {
  static const std::set<std::string> words = {"the", "a",   "an",   "on", "of",
                                              "for", "and", "with", "from"};
  return words;
}

struct FieldParser {
  std::string_view text;
  std::size_t pos = 0;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  // Reads one brace-, quote-, or bare-delimited value piece.  Returns false
  // on malformed input (unclosed delimiter).
  bool read_value_piece(std::string& out) {
    skip_ws();
    if (eof()) return false;
    if (text[pos] == '{') {
      ++pos;
      int depth = 1;
      while (!eof()) {
        const char c = text[pos];
        if (c == '\\' && pos + 1 < text.size()) {
          out.push_back(c);
          out.push_back(text[pos + 1]);
          pos += 2;
          continue;
        }
        if (c == '{') ++depth;
        if (c == '}') {
          --depth;
          if (depth == 0) {
            ++pos;
            return true;
          }
        }
        out.push_back(c);
        ++pos;
      }
      return false;  // unclosed brace
    }
    if (text[pos] == '"') {
      ++pos;
      while (!eof()) {
        const char c = text[pos];
        if (c == '\\' && pos + 1 < text.size()) {
          out.push_back(c);
          out.push_back(text[pos + 1]);
          pos += 2;
          continue;
        }
        if (c == '"') {
          ++pos;
          return true;
        }
        out.push_back(c);
        ++pos;
      }
      return false;  // unclosed quote
    }
    // Bare value: up to comma, closing brace, '#', or whitespace.
    bool any = false;
    while (!eof()) {
      const char c = text[pos];
      if (c == ',' || c == '}' || c == '#' ||
          std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      out.push_back(c);
      ++pos;
      any = true;
    }
    return any;
  }

  // Reads `value [# value]*`, joining concatenated pieces.
  bool read_value(std::string& out) {
    if (!read_value_piece(out)) return false;
    while (true) {
      const std::size_t save = pos;
      skip_ws();
      if (!eof() && text[pos] == '#') {
        ++pos;
        if (!read_value_piece(out)) return false;
        continue;
      }
      pos = save;
      return true;
    }
  }
};

std::optional<int> parse_year_value(std::string_view value) {
  // First 4-digit run in the plausible range.
  for (std::size_t i = 0; i + 4 <= value.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(value[i]))) continue;
    std::size_t run = 0;
    while (i + run < value.size() &&
           std::isdigit(static_cast<unsigned char>(value[i + run]))) {
      ++run;
    }
    if (run == 4) {
      const int year = (value[i] - '0') * 1000 + (value[i + 1] - '0') * 100 +
                       (value[i + 2] - '0') * 10 + (value[i + 3] - '0');
      if (year >= 1000 && year <= 2999) return year;
    }
    i += run;
  }
  return std::nullopt;
}

std::vector<std::string> split_authors(std::string_view value) {
  // Whitespace is already collapsed by the LaTeX filter, so the separator is
  // literally " and ".
  std::vector<std::string> authors;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const std::size_t next = value.find(" and ", pos);
    std::string piece = next == std::string_view::npos
                            ? trim(value.substr(pos))
                            : trim(value.substr(pos, next - pos));
    if (!piece.empty()) authors.push_back(std::move(piece));
    if (next == std::string_view::npos) break;
    pos = next + 5;
  }
  if (!authors.empty() && to_lower_ascii(authors.back()) == "others") {
    authors.pop_back();
  }
  return authors;
}

// Parses one entry segment.  Returns the Reference, or an explanation of why
// the segment could not be parsed.
struct EntryParseOutcome {
  std::optional<Reference> reference;
  std::string warning;
};

EntryParseOutcome parse_entry(std::string_view segment) {
  EntryParseOutcome outcome;
  FieldParser p{segment};
  p.skip_ws();
  if (p.eof() || p.peek() != '@') {
    outcome.warning = "entry does not start with '@'";
    return outcome;
  }
  ++p.pos;
  std::string type;
  while (!p.eof() && is_ascii_alpha(p.peek())) {
    type.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(p.peek()))));
    ++p.pos;
  }
  p.skip_ws();
  if (type.empty() || p.eof() || (p.peek() != '{' && p.peek() != '(')) {
    outcome.warning = "malformed entry header";
    return outcome;
  }
  const char closer = p.peek() == '{' ? '}' : ')';
  ++p.pos;

  // Citation key: up to the first comma or the entry closer.
  std::string key;
  while (!p.eof() && p.peek() != ',' && p.peek() != closer) {
    key.push_back(p.peek());
    ++p.pos;
  }
  key = trim(key);
  if (p.eof()) {
    outcome.warning = "entry '" + (key.empty() ? type : key) + "' is unterminated";
    return outcome;
  }

  std::map<std::string, std::string> raw_fields;
  bool closed = p.peek() == closer;
  if (!closed) ++p.pos;  // consume the comma after the key
  while (!closed) {
    p.skip_ws();
    if (p.eof()) break;
    if (p.peek() == closer) {
      closed = true;
      ++p.pos;
      break;
    }
    if (p.peek() == ',') {
      ++p.pos;
      continue;
    }
    std::string name;
    while (!p.eof() && (is_ascii_alpha(p.peek()) ||
                        std::isdigit(static_cast<unsigned char>(p.peek())) ||
                        p.peek() == '_' || p.peek() == '-')) {
      name.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(p.peek()))));
      ++p.pos;
    }
    p.skip_ws();
    if (name.empty() || p.eof() || p.peek() != '=') {
      outcome.warning =
          "entry '" + (key.empty() ? type : key) + "' has a malformed field";
      return outcome;
    }
    ++p.pos;  // '='
    std::string value;
    if (!p.read_value(value)) {
      outcome.warning =
          "entry '" + (key.empty() ? type : key) + "' has an unclosed value";
      return outcome;
    }
    raw_fields[name] = value;
  }
  if (!closed) {
    outcome.warning = "entry '" + (key.empty() ? type : key) + "' is unterminated";
    return outcome;
  }

  Reference ref;
  ref.entry_type = type;
  for (const auto& [name, raw_value] : raw_fields) {
    const std::string value =
        strip_protective_braces(filter_latex(raw_value));
    if (value.empty()) continue;
    ref.expected_metadata[name] = value;
    if (name == "title") {
      ref.title = value;
    } else if (name == "author") {
      ref.authors = split_authors(value);
    } else if (name == "journal" || name == "booktitle") {
      if (!ref.journal_or_venue) ref.journal_or_venue = value;
    } else if (name == "year") {
      ref.year = parse_year_value(value);
    } else if (name == "doi") {
      ref.doi = normalize_doi(value);
    } else if (name == "volume") {
      ref.volume = value;
    } else if (name == "number" || name == "issue") {
      ref.number = value;
    } else if (name == "pages") {
      ref.pages = value;
    } else if (name == "publisher") {
      ref.publisher = value;
    }
  }
  if (!ref.title && ref.authors.empty()) {
    outcome.warning =
        "entry '" + (key.empty() ? type : key) + "' has neither title nor author";
    return outcome;
  }
  ref.raw_text = filter_latex(segment);
  if (ref.raw_text.empty()) ref.raw_text = trim(segment);
  outcome.reference = std::move(ref);
  return outcome;
}

std::string collision_suffix(int n) {
  // 0 -> "a", 25 -> "z", 26 -> "aa", ... (bijective base 26).
  std::string s;
  int m = n;
  while (true) {
    s.push_back(static_cast<char>('a' + m % 26));
    if (m < 26) break;
    m = m / 26 - 1;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

InputKind detect_input_kind(std::string_view text) {
  if (trim(text).empty()) {
    throw std::invalid_argument("input is empty");
  }
  bool has_entry = false;
  int non_empty_lines = 0;
  for_each_line(text, [&](std::size_t, std::string_view line) {
    if (line_starts_entry(line)) has_entry = true;
    if (!trim(line).empty()) ++non_empty_lines;
  });
  if (has_entry) return InputKind::BibTeX;
  return non_empty_lines >= 2 ? InputKind::FreeTextList : InputKind::FreeTextSingle;
}

std::vector<std::string> split_bibtex_entries(std::string_view text) {
  std::vector<std::size_t> starts;
  for_each_line(text, [&](std::size_t pos, std::string_view line) {
    if (line_starts_entry(line)) starts.push_back(pos);
  });
  std::vector<std::string> segments;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::size_t begin = starts[i];
    const std::size_t end = i + 1 < starts.size() ? starts[i + 1] : text.size();
    std::string segment = trim(text.substr(begin, end - begin));
    if (!segment.empty()) segments.push_back(std::move(segment));
  }
  return segments;
}

ParseResult parse_bibtex(std::string_view text) {
  ParseResult result;
  for (const std::string& segment : split_bibtex_entries(text)) {
    EntryParseOutcome outcome = parse_entry(segment);
    if (outcome.reference) {
      result.references.push_back(std::move(*outcome.reference));
    } else {
      result.warnings.push_back(std::move(outcome.warning));
    }
  }
  if (result.references.empty() && result.warnings.empty()) {
    result.warnings.push_back("no BibTeX entries found");
  }
  return result;
}

std::string generate_citation_key(const CandidateRecord& record) {
  std::string family;
  if (!record.authors.empty()) family = ascii_slug(record.authors.front().family);
  if (family.empty()) family = "unknown";

  std::string year;
  if (record.year) year = std::to_string(*record.year);

  std::string title_word;
  std::string first_word;
  std::size_t pos = 0;
  const std::string& title = record.title;
  while (pos < title.size()) {
    std::size_t end = title.find(' ', pos);
    if (end == std::string::npos) end = title.size();
    const std::string slug = ascii_slug(std::string_view(title).substr(pos, end - pos));
    if (!slug.empty()) {
      if (first_word.empty()) first_word = slug;
      if (slug.size() > 3 && key_stopwords().count(slug) == 0) {
        title_word = slug;
        break;
      }
    }
    pos = end + 1;
  }
  if (title_word.empty()) title_word = first_word;

  std::string key = family + year + title_word;
  return key.empty() ? "unknown" : key;
}

std::string CitationKeyAllocator::allocate(const CandidateRecord& record) {
  const std::string base = generate_citation_key(record);
  std::string candidate = base;
  int suffix = 0;
  while (used_.count(candidate) != 0) {
    candidate = base + collision_suffix(suffix++);
  }
  used_[candidate] = 1;
  return candidate;
}

std::string generate_bibtex(const CandidateRecord& record, const std::string& key) {
  if (record.title.empty()) {
    throw std::invalid_argument("record has no title");
  }
  std::string entry_type = "misc";
  if (record.record_type) {
    const std::string t = to_lower_ascii(*record.record_type);
    if (t == "journal-article" || t == "article") {
      entry_type = "article";
    } else if (t == "proceedings-article" || t == "inproceedings" ||
               t == "conference-paper") {
      entry_type = "inproceedings";
    } else if (t == "book" || t == "monograph") {
      entry_type = "book";
    }
  }

  std::vector<std::pair<std::string, std::string>> fields;
  fields.emplace_back("title", record.title);
  if (!record.authors.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < record.authors.size(); ++i) {
      if (i > 0) joined += " and ";
      const Author& a = record.authors[i];
      joined += a.family;
      if (!a.given.empty()) {
        joined += ", ";
        joined += a.given;
      }
    }
    fields.emplace_back("author", joined);
  }
  if (record.venue && !record.venue->empty()) {
    fields.emplace_back(entry_type == "inproceedings" ? "booktitle" : "journal",
                        *record.venue);
  }
  if (record.year) fields.emplace_back("year", std::to_string(*record.year));
  if (record.volume && !record.volume->empty()) {
    fields.emplace_back("volume", *record.volume);
  }
  if (record.number && !record.number->empty()) {
    fields.emplace_back("number", *record.number);
  }
  if (record.pages && !record.pages->empty()) {
    // BibTeX convention: plain hyphens in page ranges.
    std::string pages = *record.pages;
    std::string ascii_pages;
    for (const char32_t cp : unicode::decode_utf8(pages)) {
      if (cp == U'–' || cp == U'—') {
        ascii_pages.push_back('-');
      } else {
        unicode::append_utf8(ascii_pages, cp);
      }
    }
    fields.emplace_back("pages", ascii_pages);
  }
  if (record.doi && !record.doi->empty()) fields.emplace_back("doi", *record.doi);

  std::string out = "@" + entry_type + "{" + key + ",";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out += "\n  " + fields[i].first + " = {" + fields[i].second + "}";
    if (i + 1 < fields.size()) out += ",";
  }
  out += "\n}";
  return out;
}

}  // namespace refcheck
