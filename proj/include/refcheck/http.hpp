#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refcheck {

struct HttpResponse {
  int status = 0;  // 0 together with a non-empty error = transport failure
  std::string body;
  std::map<std::string, std::string> headers;  // names lowercased
  std::string error;

  bool ok() const { return error.empty() && status >= 200 && status < 300; }
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Abstract request executor.  Implementations must be safely shareable
// across concurrent requests.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers,
                           std::chrono::milliseconds timeout) = 0;
};

// One request the fixture transport served (or failed to serve), with its
// start time; used by timing and cascade tests.
struct RecordedRequest {
  std::string url;
  std::chrono::steady_clock::time_point at;
};

// Deterministic offline playback of recorded responses.  A fixture is a
// pair of files in one directory:
//   <name>.json       verbatim response body bytes
//   <name>.meta.json  {"url_pattern": "<glob with *>", "status": 200}
// The entry whose pattern matches the requested URL wins; among multiple
// matches the longest pattern (most specific) is chosen, ties broken by
// filename.  Unmatched URLs fail like a network error.
class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(const std::string& directory);

  HttpResponse get(const std::string& url, const HttpHeaders& headers,
                   std::chrono::milliseconds timeout) override;

  // Problems found while loading the fixture directory (missing bodies,
  // unreadable sidecars); empty when the directory loaded cleanly.
  const std::vector<std::string>& load_warnings() const { return load_warnings_; }
  std::size_t fixture_count() const { return entries_.size(); }

  std::vector<RecordedRequest> requests() const;
  void clear_requests();

  // Glob with '*' as "any run of characters"; all else literal.
  static bool glob_match(std::string_view pattern, std::string_view text);

 private:
  struct Entry {
    std::string name;     // fixture stem, e.g. "crossref_attention"
    std::string pattern;  // url glob
    int status = 200;
    std::string body;
  };

  std::vector<Entry> entries_;  // sorted most-specific-first
  std::vector<std::string> load_warnings_;
  mutable std::mutex mutex_;
  std::vector<RecordedRequest> log_;
};

// Live HTTPS/HTTP transport.
class LiveTransport : public Transport {
 public:
  HttpResponse get(const std::string& url, const HttpHeaders& headers,
                   std::chrono::milliseconds timeout) override;
};

}  // namespace refcheck
