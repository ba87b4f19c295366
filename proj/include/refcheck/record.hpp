#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refcheck {

// The upstream databases, in cascade order.
enum class SourceId { CrossRef, SemanticScholar, OpenAlex };

// 1 = CrossRef (primary), 2 = Semantic Scholar, 3 = OpenAlex.
int source_rank(SourceId source);

// Human-readable name, e.g. "CrossRef".
std::string_view source_label(SourceId source);

// Stable machine token used in JSON output, e.g. "crossref".
std::string_view source_key(SourceId source);

struct Author {
  std::string family;
  std::string given;  // may be empty
};

// One bibliographic record returned by a scholarly source, normalized to a
// common shape.  `title` is always non-empty (title-less items are dropped
// by the response mappers); `doi` is stored in bare lowercase suffix form
// (no scheme, host, or "doi:" prefix).
struct CandidateRecord {
  SourceId source = SourceId::CrossRef;
  std::string title;
  std::vector<Author> authors;
  std::optional<std::string> venue;
  std::optional<int> year;
  std::optional<std::string> doi;
  std::optional<std::string> volume;
  std::optional<std::string> number;
  std::optional<std::string> pages;
  std::optional<std::string> record_type;
};

// Lowercases a DOI and strips any "https://doi.org/", "http://dx.doi.org/",
// or "doi:" style prefix, returning the bare registrant/suffix form.
std::string normalize_doi(std::string_view raw);

}  // namespace refcheck
