#include "refcheck/sources.hpp"

#include <algorithm>
#include <thread>

#include <json.hpp>

#include "refcheck/matching.hpp"

namespace refcheck {

namespace {

using nlohmann::json;

std::string opt_string(const json& obj, const char* key) {
  if (!obj.is_object()) return "";
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return "";
  return it->get<std::string>();
}

std::optional<int> opt_int(const json& obj, const char* key) {
  if (!obj.is_object()) return std::nullopt;
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<int>();
}

void set_if_nonempty(std::optional<std::string>& field, std::string value) {
  if (!value.empty()) field = std::move(value);
}

std::string trim_spaces(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Family name as written: text before the comma, else the last
// whitespace-separated token.  Queries keep original casing; only the
// matching layer normalizes.
std::string raw_family_name(std::string_view author) {
  const auto comma = author.find(',');
  if (comma != std::string_view::npos) {
    return trim_spaces(author.substr(0, comma));
  }
  const std::string trimmed = trim_spaces(author);
  const auto space = trimmed.find_last_of(" \t");
  if (space == std::string::npos) return trimmed;
  return trimmed.substr(space + 1);
}

// CrossRef date fields look like {"date-parts": [[2017, 6, 12]]}.
std::optional<int> crossref_year(const json& item, const char* key) {
  if (!item.is_object()) return std::nullopt;
  const auto it = item.find(key);
  if (it == item.end() || !it->is_object()) return std::nullopt;
  const auto parts = it->find("date-parts");
  if (parts == it->end() || !parts->is_array() || parts->empty()) {
    return std::nullopt;
  }
  const json& first = (*parts)[0];
  if (!first.is_array() || first.empty() || !first[0].is_number_integer()) {
    return std::nullopt;
  }
  return first[0].get<int>();
}

std::string first_of_string_array(const json& obj, const char* key) {
  if (!obj.is_object()) return "";
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array() || it->empty() ||
      !(*it)[0].is_string()) {
    return "";
  }
  return (*it)[0].get<std::string>();
}

// "Ashish Vaswani" -> family "Vaswani", given "Ashish".
Author split_display_name(const std::string& name) {
  Author author;
  const std::size_t last_space = name.find_last_of(' ');
  if (last_space == std::string::npos) {
    author.family = name;
  } else {
    author.family = name.substr(last_space + 1);
    author.given = name.substr(0, last_space);
    // Trim trailing spaces in the given part.
    while (!author.given.empty() && author.given.back() == ' ') {
      author.given.pop_back();
    }
  }
  return author;
}

MapResult parse_failure(std::string_view label) {
  MapResult result;
  result.error = std::string(label) + " response body is not parseable JSON";
  return result;
}

}  // namespace

std::string build_query(const Reference& ref) {
  if (ref.structured()) {
    std::vector<std::string> parts;
    if (ref.title) parts.push_back(*ref.title);
    for (const std::string& author : ref.authors) {
      const std::string family = raw_family_name(author);
      if (!family.empty()) parts.push_back(family);
    }
    if (ref.year) parts.push_back(std::to_string(*ref.year));
    if (!parts.empty()) {
      std::string query;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) query += ' ';
        query += parts[i];
      }
      return query;
    }
  }
  // Free text (or a structured entry with no usable fields): pass the
  // filtered text through, truncated at a word boundary.
  constexpr std::size_t kMaxLength = 300;
  const std::string& text = ref.raw_text;
  if (text.size() <= kMaxLength) return text;
  std::size_t cut = text.rfind(' ', kMaxLength);
  if (cut == std::string::npos || cut == 0) cut = kMaxLength;
  std::string query = text.substr(0, cut);
  while (!query.empty() && query.back() == ' ') query.pop_back();
  return query;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() * 3);
  for (const char c : s) {
    const unsigned char byte = static_cast<unsigned char>(c);
    const bool unreserved = (byte >= 'A' && byte <= 'Z') ||
                            (byte >= 'a' && byte <= 'z') ||
                            (byte >= '0' && byte <= '9') || byte == '-' ||
                            byte == '.' || byte == '_' || byte == '~';
    if (unreserved) {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(kHex[byte >> 4]);
      out.push_back(kHex[byte & 0x0F]);
    }
  }
  return out;
}

std::string build_source_url(SourceId source, std::string_view query,
                             const std::optional<std::string>& contact) {
  const std::string encoded = url_encode(query);
  switch (source) {
    case SourceId::CrossRef: {
      std::string url = "https://api.crossref.org/works?query.bibliographic=" +
                        encoded + "&rows=3";
      if (contact && !contact->empty()) {
        url += "&mailto=" + url_encode(*contact);
      }
      return url;
    }
    case SourceId::SemanticScholar:
      return "https://api.semanticscholar.org/graph/v1/paper/search?query=" +
             encoded + "&limit=3&fields=title,authors,venue,year,externalIds";
    case SourceId::OpenAlex: {
      std::string url =
          "https://api.openalex.org/works?search=" + encoded + "&per-page=3";
      if (contact && !contact->empty()) {
        url += "&mailto=" + url_encode(*contact);
      }
      return url;
    }
  }
  return "";
}

MapResult map_crossref(const std::string& body) {
  const json root = json::parse(body, nullptr, false);
  if (root.is_discarded() || !root.is_object()) return parse_failure("CrossRef");
  MapResult result;
  const auto message = root.find("message");
  if (message == root.end() || !message->is_object()) {
    result.error = "CrossRef response has no message object";
    return result;
  }
  const auto items = message->find("items");
  if (items == message->end() || !items->is_array()) return result;

  for (const json& item : *items) {
    if (!item.is_object()) continue;
    CandidateRecord record;
    record.source = SourceId::CrossRef;
    record.title = first_of_string_array(item, "title");
    if (record.title.empty()) continue;  // title-less items are dropped

    if (const auto authors = item.find("author");
        authors != item.end() && authors->is_array()) {
      for (const json& a : *authors) {
        if (!a.is_object()) continue;
        Author author;
        author.family = opt_string(a, "family");
        author.given = opt_string(a, "given");
        if (author.family.empty()) {
          // Some records carry a single "name" string instead.
          const std::string name = opt_string(a, "name");
          if (name.empty()) continue;
          author = split_display_name(name);
        }
        record.authors.push_back(std::move(author));
      }
    }
    set_if_nonempty(record.venue, first_of_string_array(item, "container-title"));

    // Earliest of the published date parts on the record.
    std::optional<int> year;
    for (const char* key : {"published-print", "published-online", "issued"}) {
      const std::optional<int> candidate = crossref_year(item, key);
      if (candidate && (!year || *candidate < *year)) year = candidate;
    }
    record.year = year;

    const std::string doi = opt_string(item, "DOI");
    if (!doi.empty()) record.doi = normalize_doi(doi);
    set_if_nonempty(record.volume, opt_string(item, "volume"));
    set_if_nonempty(record.number, opt_string(item, "issue"));
    set_if_nonempty(record.pages, opt_string(item, "page"));
    set_if_nonempty(record.record_type, opt_string(item, "type"));
    result.records.push_back(std::move(record));
  }
  return result;
}

MapResult map_semantic_scholar(const std::string& body) {
  const json root = json::parse(body, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    return parse_failure("Semantic Scholar");
  }
  MapResult result;
  const auto data = root.find("data");
  if (data == root.end() || !data->is_array()) return result;

  for (const json& item : *data) {
    if (!item.is_object()) continue;
    CandidateRecord record;
    record.source = SourceId::SemanticScholar;
    record.title = opt_string(item, "title");
    if (record.title.empty()) continue;

    if (const auto authors = item.find("authors");
        authors != item.end() && authors->is_array()) {
      for (const json& a : *authors) {
        if (!a.is_object()) continue;
        const std::string name = opt_string(a, "name");
        if (name.empty()) continue;
        record.authors.push_back(split_display_name(name));
      }
    }
    set_if_nonempty(record.venue, opt_string(item, "venue"));
    record.year = opt_int(item, "year");
    if (const auto ids = item.find("externalIds");
        ids != item.end() && ids->is_object()) {
      const std::string doi = opt_string(*ids, "DOI");
      if (!doi.empty()) record.doi = normalize_doi(doi);
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

MapResult map_openalex(const std::string& body) {
  const json root = json::parse(body, nullptr, false);
  if (root.is_discarded() || !root.is_object()) return parse_failure("OpenAlex");
  MapResult result;
  const auto items = root.find("results");
  if (items == root.end() || !items->is_array()) return result;

  for (const json& item : *items) {
    if (!item.is_object()) continue;
    CandidateRecord record;
    record.source = SourceId::OpenAlex;
    record.title = opt_string(item, "display_name");
    if (record.title.empty()) record.title = opt_string(item, "title");
    if (record.title.empty()) continue;

    if (const auto authorships = item.find("authorships");
        authorships != item.end() && authorships->is_array()) {
      for (const json& entry : *authorships) {
        if (!entry.is_object()) continue;
        const auto author = entry.find("author");
        if (author == entry.end() || !author->is_object()) continue;
        const std::string name = opt_string(*author, "display_name");
        if (name.empty()) continue;
        record.authors.push_back(split_display_name(name));
      }
    }

    // Venue: current shape (primary_location.source.display_name) with the
    // legacy host_venue as fallback.
    if (const auto location = item.find("primary_location");
        location != item.end() && location->is_object()) {
      const auto src = location->find("source");
      if (src != location->end() && src->is_object()) {
        set_if_nonempty(record.venue, opt_string(*src, "display_name"));
      }
    }
    if (!record.venue) {
      if (const auto host = item.find("host_venue");
          host != item.end() && host->is_object()) {
        set_if_nonempty(record.venue, opt_string(*host, "display_name"));
      }
    }

    record.year = opt_int(item, "publication_year");
    const std::string doi = opt_string(item, "doi");
    if (!doi.empty()) record.doi = normalize_doi(doi);
    if (const auto biblio = item.find("biblio");
        biblio != item.end() && biblio->is_object()) {
      set_if_nonempty(record.volume, opt_string(*biblio, "volume"));
      set_if_nonempty(record.number, opt_string(*biblio, "issue"));
      const std::string first_page = opt_string(*biblio, "first_page");
      const std::string last_page = opt_string(*biblio, "last_page");
      if (!first_page.empty() && !last_page.empty()) {
        record.pages = first_page + "-" + last_page;
      } else if (!first_page.empty()) {
        record.pages = first_page;
      }
    }
    set_if_nonempty(record.record_type, opt_string(item, "type"));
    result.records.push_back(std::move(record));
  }
  return result;
}

RateLimiter::RateLimiter(std::chrono::milliseconds interval)
    : interval_(interval) {}

void RateLimiter::acquire(SourceId source) {
  if (interval_.count() <= 0) return;
  const std::size_t index = static_cast<std::size_t>(source_rank(source) - 1);
  std::chrono::steady_clock::time_point start;
  {
    const std::lock_guard<std::mutex> lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    start = next_allowed_[index] ? std::max(now, *next_allowed_[index]) : now;
    next_allowed_[index] = start + interval_;
  }
  std::this_thread::sleep_until(start);
}

SourceClient::SourceClient(Transport& transport, RateLimiter& limiter,
                           SourceClientConfig config)
    : transport_(transport), limiter_(limiter), config_(std::move(config)) {}

HttpResponse SourceClient::fetch(SourceId source, const std::string& url) {
  HttpHeaders headers;
  std::string user_agent = config_.user_agent;
  if (config_.contact && !config_.contact->empty()) {
    user_agent += " (mailto:" + *config_.contact + ")";
  }
  headers.emplace_back("User-Agent", user_agent);
  headers.emplace_back("Accept", "application/json");

  limiter_.acquire(source);
  attempted_.fetch_add(1);
  HttpResponse response = transport_.get(url, headers, config_.timeout);

  bool retry = false;
  std::chrono::milliseconds backoff = config_.retry_backoff;
  if (!response.error.empty() || response.status >= 500) {
    retry = true;
  } else if (response.status == 429) {
    retry = true;
    const auto it = response.headers.find("retry-after");
    if (it != response.headers.end()) {
      try {
        const long seconds = std::stol(it->second);
        backoff = std::min(config_.max_retry_after,
                           std::chrono::milliseconds(seconds * 1000));
      } catch (const std::exception&) {
        // Keep the default backoff when the header is not a plain number.
      }
    }
  }
  if (!retry) {
    if (response.ok()) succeeded_.fetch_add(1);
    return response;
  }

  std::this_thread::sleep_for(backoff);
  limiter_.acquire(source);
  attempted_.fetch_add(1);
  response = transport_.get(url, headers, config_.timeout);
  if (response.ok()) succeeded_.fetch_add(1);
  return response;
}

SearchOutcome SourceClient::search(SourceId source, const std::string& query) {
  const std::pair<int, std::string> key(source_rank(source), query);
  {
    const std::lock_guard<std::mutex> lock(cache_mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }

  const std::string url = build_source_url(source, query, config_.contact);
  const HttpResponse response = fetch(source, url);

  SearchOutcome outcome;
  const std::string label(source_label(source));
  if (!response.error.empty()) {
    outcome.transport_ok = false;
    outcome.warning = label + " request failed: " + response.error;
  } else if (response.status < 200 || response.status >= 300) {
    outcome.transport_ok = false;
    outcome.warning =
        label + " request failed: HTTP " + std::to_string(response.status);
  } else {
    MapResult mapped;
    switch (source) {
      case SourceId::CrossRef:
        mapped = map_crossref(response.body);
        break;
      case SourceId::SemanticScholar:
        mapped = map_semantic_scholar(response.body);
        break;
      case SourceId::OpenAlex:
        mapped = map_openalex(response.body);
        break;
    }
    outcome.records = std::move(mapped.records);
    if (mapped.error) outcome.warning = *mapped.error;
  }

  const std::lock_guard<std::mutex> lock(cache_mutex_);
  cache_[key] = outcome;
  return outcome;
}

}  // namespace refcheck
