#include "refcheck/latex_filter.hpp"

#include <array>
#include <cctype>
#include <string>
#include <vector>

namespace refcheck {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// Commands whose brace argument is layout, never bibliographic content.
bool drops_argument(std::string_view name) {
  static constexpr std::array<std::string_view, 7> kDropping = {
      "vspace", "hspace", "vskip", "hskip", "label", "newline", "noindent"};
  for (auto d : kDropping) {
    if (name == d) return true;
  }
  return false;
}

// Removes lines whose first non-whitespace character is '%'.
std::string strip_comment_lines(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    size_t eol = in.find('\n', i);
    if (eol == std::string_view::npos) eol = in.size();
    std::string_view line = in.substr(i, eol - i);
    size_t first = 0;
    while (first < line.size() && is_space(line[first])) ++first;
    if (first >= line.size() || line[first] != '%') {
      out.append(line);
      out.push_back('\n');
    }
    i = eol + 1;
  }
  return out;
}

// Finds the index just past the group closed by the brace opened at `open`.
// Returns npos when the group never closes.
size_t balanced_group_end(std::string_view s, size_t open) {
  int depth = 0;
  for (size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\' && i + 1 < s.size()) {
      ++i;  // escaped character, does not affect depth
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::string collapse_whitespace(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char c : in) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

namespace {

std::string filter_pass(std::string_view input) {
  const std::string decommented = strip_comment_lines(input);
  const std::string_view s = decommented;

  std::string out;
  out.reserve(s.size());
  // Depths at which a content-preserving command consumed its '{'; the
  // matching '}' is dropped when the depth unwinds to one of these.
  std::vector<int> preserved_group_depths;
  int depth = 0;

  size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c != '\\') {
      if (c == '{') {
        ++depth;
        out.push_back(c);
      } else if (c == '}') {
        if (!preserved_group_depths.empty() &&
            preserved_group_depths.back() == depth) {
          preserved_group_depths.pop_back();
        } else {
          out.push_back(c);
        }
        if (depth > 0) --depth;
      } else {
        out.push_back(c);
      }
      ++i;
      continue;
    }

    // Backslash handling.
    if (i + 1 >= s.size()) {
      ++i;  // dangling backslash
      break;
    }
    const char next = s[i + 1];

    if (next == '\\') {
      // Line break, possibly with an optional [length] argument.
      i += 2;
      if (i < s.size() && s[i] == '[') {
        size_t close = s.find(']', i);
        if (close != std::string_view::npos) i = close + 1;
      }
      out.push_back(' ');
      continue;
    }

    if (!is_alpha(next)) {
      // Control symbol: \& \% \$ \# \_ \{ \} keep the escaped character;
      // spacing symbols become a space.
      if (next == ',' || next == ';' || next == '!' || next == ' ') {
        out.push_back(' ');
      } else {
        out.push_back(next);
      }
      i += 2;
      continue;
    }

    // Command token.
    size_t j = i + 1;
    while (j < s.size() && is_alpha(s[j])) ++j;
    const std::string_view name = s.substr(i + 1, j - i - 1);
    if (j < s.size() && s[j] == '*') ++j;

    if (drops_argument(name)) {
      size_t k = j;
      while (k < s.size() && is_space(s[k])) ++k;
      if (k < s.size() && s[k] == '[') {
        size_t close = s.find(']', k);
        if (close != std::string_view::npos) {
          k = close + 1;
          while (k < s.size() && is_space(s[k])) ++k;
        }
      }
      if (k < s.size() && s[k] == '{') {
        size_t end = balanced_group_end(s, k);
        if (end != std::string_view::npos) {
          i = end;
          continue;
        }
        // Unbalanced: drop only the command token, keep the text.
      }
      i = j;
      continue;
    }

    // Content-preserving (known wrapper or unknown macro): drop the token,
    // unwrap the brace argument when one follows.
    size_t k = j;
    while (k < s.size() && is_space(s[k])) ++k;
    if (k < s.size() && s[k] == '{' &&
        balanced_group_end(s, k) != std::string_view::npos) {
      ++depth;
      preserved_group_depths.push_back(depth);
      i = k + 1;
    } else {
      i = j;
    }
  }

  return collapse_whitespace(out);
}

}  // namespace

std::string filter_latex(std::string_view input) {
  // A single pass can uncover constructs that were shadowed by the text
  // removed in front of them (e.g. a '%' that becomes the first character of
  // its line once a command vanishes), so iterate to a fixed point.  This
  // terminates: the first pass leaves the text whitespace-collapsed, and on
  // collapsed text any further change strictly removes characters.
  std::string current = filter_pass(input);
  while (true) {
    std::string next = filter_pass(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

}  // namespace refcheck
