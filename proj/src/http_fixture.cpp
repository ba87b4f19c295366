#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "refcheck/http.hpp"

namespace refcheck {

namespace {

constexpr std::string_view kMetaSuffix = ".meta.json";

bool read_file(const std::filesystem::path& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

}  // namespace

FixtureTransport::FixtureTransport(const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    load_warnings_.push_back("fixture directory '" + directory +
                             "' does not exist");
    return;
  }
  std::vector<fs::path> meta_files;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    const std::string filename = entry.path().filename().string();
    if (filename.size() > kMetaSuffix.size() &&
        filename.ends_with(kMetaSuffix)) {
      meta_files.push_back(entry.path());
    }
  }
  std::sort(meta_files.begin(), meta_files.end());

  for (const fs::path& meta_path : meta_files) {
    const std::string filename = meta_path.filename().string();
    const std::string stem =
        filename.substr(0, filename.size() - kMetaSuffix.size());
    std::string meta_text;
    if (!read_file(meta_path, meta_text)) {
      load_warnings_.push_back("cannot read fixture sidecar '" + filename + "'");
      continue;
    }
    const nlohmann::json meta = nlohmann::json::parse(meta_text, nullptr, false);
    if (meta.is_discarded() || !meta.is_object() ||
        !meta.contains("url_pattern") || !meta["url_pattern"].is_string()) {
      load_warnings_.push_back("fixture sidecar '" + filename +
                               "' is not a valid {url_pattern, status} object");
      continue;
    }
    Entry entry;
    entry.name = stem;
    entry.pattern = meta["url_pattern"].get<std::string>();
    entry.status = meta.value("status", 200);
    if (!read_file(meta_path.parent_path() / (stem + ".json"), entry.body)) {
      load_warnings_.push_back("fixture '" + stem + "' has no body file '" +
                               stem + ".json'");
      continue;
    }
    entries_.push_back(std::move(entry));
  }

  // Most specific pattern first; stable order for equal-length patterns.
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.pattern.size() != b.pattern.size()) {
      return a.pattern.size() > b.pattern.size();
    }
    return a.name < b.name;
  });
}

bool FixtureTransport::glob_match(std::string_view pattern,
                                  std::string_view text) {
  // Iterative wildcard matching with backtracking over the last '*'.
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star = std::string_view::npos;
  std::size_t star_t = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      star_t = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

HttpResponse FixtureTransport::get(const std::string& url,
                                   const HttpHeaders& /*headers*/,
                                   std::chrono::milliseconds /*timeout*/) {
  {
    const std::lock_guard<std::mutex> lock(mutex_);
    log_.push_back({url, std::chrono::steady_clock::now()});
  }
  for (const Entry& entry : entries_) {
    if (!glob_match(entry.pattern, url)) continue;
    HttpResponse response;
    response.status = entry.status;
    response.body = entry.body;
    return response;
  }
  HttpResponse response;
  response.error = "no fixture matches url: " + url;
  return response;
}

std::vector<RecordedRequest> FixtureTransport::requests() const {
  const std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

void FixtureTransport::clear_requests() {
  const std::lock_guard<std::mutex> lock(mutex_);
  log_.clear();
}

}  // namespace refcheck
