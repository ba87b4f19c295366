#include "refcheck/record.hpp"

#include <algorithm>
#include <cctype>

namespace refcheck {

int source_rank(SourceId source) {
  switch (source) {
    case SourceId::CrossRef:
      return 1;
    case SourceId::SemanticScholar:
      return 2;
    case SourceId::OpenAlex:
      return 3;
  }
  return 3;
}

std::string_view source_label(SourceId source) {
  switch (source) {
    case SourceId::CrossRef:
      return "CrossRef";
    case SourceId::SemanticScholar:
      return "Semantic Scholar";
    case SourceId::OpenAlex:
      return "OpenAlex";
  }
  return "OpenAlex";
}

std::string_view source_key(SourceId source) {
  switch (source) {
    case SourceId::CrossRef:
      return "crossref";
    case SourceId::SemanticScholar:
      return "semantic_scholar";
    case SourceId::OpenAlex:
      return "openalex";
  }
  return "openalex";
}

std::string normalize_doi(std::string_view raw) {
  std::string doi;
  doi.reserve(raw.size());
  for (const char c : raw) {
    doi.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(c))));
  }
  // Trim surrounding whitespace.
  const auto first = doi.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = doi.find_last_not_of(" \t\r\n");
  doi = doi.substr(first, last - first + 1);

  for (const std::string_view prefix :
       {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
        "http://dx.doi.org/", "doi.org/", "dx.doi.org/", "doi:"}) {
    if (doi.size() > prefix.size() && doi.compare(0, prefix.size(), prefix) == 0) {
      doi.erase(0, prefix.size());
      break;
    }
  }
  return doi;
}

}  // namespace refcheck
