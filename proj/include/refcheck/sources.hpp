#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refcheck/bibtex.hpp"
#include "refcheck/http.hpp"
#include "refcheck/record.hpp"

namespace refcheck {

// Structured refs: "title + space-joined author family names + year";
// free-text refs: the raw (LaTeX-filtered) text, truncated to 300
// characters at a word boundary.
std::string build_query(const Reference& ref);

// Percent-encoding; unreserved characters [A-Za-z0-9-._~] pass through.
std::string url_encode(std::string_view s);

// Full request URL for one source.  The polite-pool contact is attached
// where the API supports it (CrossRef and OpenAlex `mailto` parameters).
std::string build_source_url(SourceId source, std::string_view query,
                             const std::optional<std::string>& contact);

// Result of mapping one response body into candidate records.
struct MapResult {
  std::vector<CandidateRecord> records;
  std::optional<std::string> error;  // set when the body was unparseable
};

// Response mappers, one per source.  Items lacking a title are dropped;
// DOIs are normalized to bare lowercase form; a body that is not valid JSON
// of the expected shape yields an empty record list plus an error.
MapResult map_crossref(const std::string& body);
MapResult map_semantic_scholar(const std::string& body);
MapResult map_openalex(const std::string& body);

// Serializes request starts per source: consecutive permits for the same
// source are spaced by at least the configured interval (measured
// start-to-start); different sources never delay each other.  An interval
// of zero disables pacing (quick mode).
class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds interval);

  // Blocks until this source's next slot, then claims it.
  void acquire(SourceId source);

  std::chrono::milliseconds interval() const { return interval_; }

 private:
  std::chrono::milliseconds interval_;
  std::mutex mutex_;
  std::array<std::optional<std::chrono::steady_clock::time_point>, 3>
      next_allowed_;
};

struct SearchOutcome {
  std::vector<CandidateRecord> records;
  std::optional<std::string> warning;
  bool transport_ok = true;  // false when no HTTP response was obtained
};

struct SourceClientConfig {
  std::optional<std::string> contact;
  std::chrono::milliseconds timeout{10000};
  std::chrono::milliseconds retry_backoff{1000};
  std::chrono::milliseconds max_retry_after{10000};
  std::string user_agent = "refcheck/0.1.0";
};

// One verification's view of the upstream sources: pacing via the shared
// rate limiter, a single retry with backoff on transient failures, and a
// per-(source, query) response cache so a query repeated within the same
// verification is not re-sent.
class SourceClient {
 public:
  SourceClient(Transport& transport, RateLimiter& limiter,
               SourceClientConfig config);

  SearchOutcome search(SourceId source, const std::string& query);

  int requests_attempted() const { return attempted_.load(); }
  int requests_succeeded() const { return succeeded_.load(); }

 private:
  HttpResponse fetch(SourceId source, const std::string& url);

  Transport& transport_;
  RateLimiter& limiter_;
  SourceClientConfig config_;
  std::mutex cache_mutex_;
  std::map<std::pair<int, std::string>, SearchOutcome> cache_;
  std::atomic<int> attempted_{0};
  std::atomic<int> succeeded_{0};
};

}  // namespace refcheck
