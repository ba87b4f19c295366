#include "refcheck/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <stdexcept>

#include <json.hpp>

#include "refcheck/bibtex.hpp"
#include "refcheck/unicode.hpp"
#include "refcheck/version.hpp"

namespace refcheck {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_score_1(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

// "Jane Q." -> "J. Q.", "Jean-Paul" -> "J.-P.", "J." -> "J."
std::string initials_of(const std::string& given) {
  const std::u32string cps = unicode::decode_utf8(given);
  std::string out;
  bool at_part_start = true;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (cp == U' ') {
      at_part_start = true;
      continue;
    }
    if (cp == U'-') {
      if (!out.empty()) out += "-";
      at_part_start = true;
      continue;
    }
    if (cp == U'.') continue;
    if (at_part_start) {
      if (!out.empty() && out.back() != '-') out += " ";
      unicode::append_utf8(out, cp);
      out += ".";
      at_part_start = false;
    }
  }
  return out;
}

std::string apa_name(const Author& author) {
  const std::string initials = initials_of(author.given);
  if (author.family.empty()) return initials;
  if (initials.empty()) return author.family;
  return author.family + ", " + initials;
}

std::string apa_author_list(const std::vector<Author>& authors) {
  std::vector<std::string> groups;
  groups.reserve(authors.size());
  for (const Author& author : authors) {
    const std::string group = apa_name(author);
    if (!group.empty()) groups.push_back(group);
  }
  if (groups.empty()) return "";
  if (groups.size() == 1) return groups.front();
  std::string out;
  if (groups.size() <= 20) {
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
      if (i > 0) out += ", ";
      out += groups[i];
    }
    out += ", & " + groups.back();
    return out;
  }
  // APA-7: the first 19 authors, an ellipsis, then the final author.
  for (std::size_t i = 0; i < 19; ++i) {
    if (i > 0) out += ", ";
    out += groups[i];
  }
  out += ", ... " + groups.back();
  return out;
}

std::string en_dash_pages(const std::string& pages) {
  std::string out;
  for (const char32_t cp : unicode::decode_utf8(pages)) {
    if (cp == U'-') {
      out += "–";
    } else {
      unicode::append_utf8(out, cp);
    }
  }
  return out;
}

bool ends_with_terminal_punctuation(const std::string& s) {
  if (s.empty()) return false;
  const char last = s.back();
  return last == '.' || last == '!' || last == '?';
}

ordered_json optional_string_json(const std::optional<std::string>& value) {
  if (value) return *value;
  return nullptr;
}

ordered_json corrected_json(const std::optional<CandidateRecord>& corrected) {
  if (!corrected) return nullptr;
  ordered_json j;
  j["source"] = std::string(source_key(corrected->source));
  j["title"] = corrected->title;
  ordered_json authors = ordered_json::array();
  for (const Author& author : corrected->authors) {
    ordered_json a;
    a["family"] = author.family;
    a["given"] = author.given;
    authors.push_back(std::move(a));
  }
  j["authors"] = std::move(authors);
  j["venue"] = optional_string_json(corrected->venue);
  if (corrected->year) {
    j["year"] = *corrected->year;
  } else {
    j["year"] = nullptr;
  }
  j["doi"] = optional_string_json(corrected->doi);
  j["volume"] = optional_string_json(corrected->volume);
  j["number"] = optional_string_json(corrected->number);
  j["pages"] = optional_string_json(corrected->pages);
  j["type"] = optional_string_json(corrected->record_type);
  return j;
}

ordered_json result_json(const VerificationResult& result, std::size_t index) {
  ordered_json j;
  j["index"] = index;
  j["input"] = result.input_text;
  j["verdict"] = std::string(verdict_key(result.verdict));
  j["exists"] = result.exists;
  j["confidence"] = round2(result.confidence.value);
  double penalty_total = 0.0;
  for (const auto& [issue, penalty] : result.confidence.penalties_applied) {
    penalty_total += penalty;
  }
  ordered_json breakdown;
  breakdown["base"] = round2(result.confidence.pre_penalty);
  breakdown["bonus"] = round2(result.confidence.bonus_applied);
  breakdown["penalty_total"] = round2(penalty_total);
  j["confidence_breakdown"] = std::move(breakdown);

  ordered_json issues = ordered_json::array();
  for (const Issue& issue : result.issues) {
    ordered_json item;
    item["code"] = std::string(issue_code_name(issue.code));
    item["detail"] = issue.detail;
    item["penalty"] = issue.penalty;
    issues.push_back(std::move(item));
  }
  j["issues"] = std::move(issues);
  j["confirmed_authors"] = result.confirmed_authors;
  j["suspect_authors"] = result.suspect_authors;
  j["corrected"] = corrected_json(result.corrected);
  j["apa"] = result.apa;
  j["bibtex"] = result.bibtex;
  ordered_json sources = ordered_json::array();
  for (const SourceId source : result.sources_consulted) {
    sources.push_back(std::string(source_key(source)));
  }
  j["sources_consulted"] = std::move(sources);
  j["warnings"] = result.warnings;
  return j;
}

}  // namespace

std::string current_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long value = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0' && value >= 0) {
      now = static_cast<std::time_t>(value);
    }
  }
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

Report make_report(std::vector<VerificationResult> results,
                   BatchSummary summary) {
  Report report;
  report.results = std::move(results);
  report.summary = summary;
  report.generated_at = current_timestamp_utc();
  report.tool_version = std::string(kToolVersion);
  return report;
}

std::string format_apa(const CandidateRecord& record) {
  if (record.title.empty()) {
    throw std::invalid_argument("record has no title");
  }
  std::string out;
  const std::string authors = apa_author_list(record.authors);
  if (!authors.empty()) out += authors + " ";
  if (record.year) out += "(" + std::to_string(*record.year) + "). ";
  out += record.title;
  if (!ends_with_terminal_punctuation(record.title)) out += ".";

  std::vector<std::string> venue_parts;
  if (record.venue && !record.venue->empty()) venue_parts.push_back(*record.venue);
  if (record.volume && !record.volume->empty()) {
    std::string part = *record.volume;
    if (record.number && !record.number->empty()) {
      part += "(" + *record.number + ")";
    }
    venue_parts.push_back(part);
  }
  if (record.pages && !record.pages->empty()) {
    venue_parts.push_back(en_dash_pages(*record.pages));
  }
  if (!venue_parts.empty()) {
    out += " ";
    for (std::size_t i = 0; i < venue_parts.size(); ++i) {
      if (i > 0) out += ", ";
      out += venue_parts[i];
    }
    out += ".";
  }
  if (record.doi && !record.doi->empty()) {
    out += " https://doi.org/" + *record.doi;  // no trailing period
  }
  return out;
}

std::string render_result_text(const VerificationResult& result,
                               std::size_t index, std::size_t total) {
  const char* symbol = "?";
  switch (result.verdict) {
    case Verdict::Verified:
      symbol = "✓";  // check mark
      break;
    case Verdict::PartialMatch:
      symbol = "~";
      break;
    case Verdict::NotFound:
      symbol = "✗";  // ballot x
      break;
  }
  std::string out = "[" + std::to_string(index + 1) + "/" +
                    std::to_string(total) + "] " + symbol + " " +
                    std::string(verdict_label(result.verdict)) +
                    " (confidence " + format_score_1(result.confidence.value) +
                    ")\n";
  out += "    input: " + result.input_text + "\n";
  for (const Issue& issue : result.issues) {
    out += "    issue: " + std::string(issue_code_name(issue.code)) + ": " +
           issue.detail + " (" + std::to_string(issue.penalty) + ")\n";
  }
  if (!result.confirmed_authors.empty()) {
    out += "    confirmed authors:";
    for (const std::string& name : result.confirmed_authors) out += " " + name;
    out += "\n";
  }
  if (!result.suspect_authors.empty()) {
    out += "    suspect authors:";
    for (const std::string& name : result.suspect_authors) out += " " + name;
    out += "\n";
  }
  if (!result.apa.empty()) out += "    apa: " + result.apa + "\n";
  if (!result.sources_consulted.empty()) {
    out += "    sources:";
    for (std::size_t i = 0; i < result.sources_consulted.size(); ++i) {
      out += i == 0 ? " " : ", ";
      out += source_label(result.sources_consulted[i]);
    }
    out += "\n";
  }
  for (const std::string& warning : result.warnings) {
    out += "    warning: " + warning + "\n";
  }
  return out;
}

std::string render_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["tool"] = std::string(kToolName);
    j["version"] = report.tool_version;
    j["generated_at"] = report.generated_at;
    ordered_json summary;
    summary["total"] = report.summary.total();
    summary["verified"] = report.summary.verified;
    summary["partial_match"] = report.summary.partial;
    summary["not_found"] = report.summary.not_found;
    summary["errors"] = report.summary.errors;
    j["summary"] = std::move(summary);
    ordered_json results = ordered_json::array();
    for (std::size_t i = 0; i < report.results.size(); ++i) {
      results.push_back(result_json(report.results[i], i));
    }
    j["results"] = std::move(results);
    return j.dump(2) + "\n";
  }

  std::string out;
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    out += render_result_text(report.results[i], i, report.results.size());
    out += "\n";
  }
  out += "Summary: " + std::to_string(report.summary.verified) + " verified, " +
         std::to_string(report.summary.partial) + " partial match, " +
         std::to_string(report.summary.not_found) + " not found, " +
         std::to_string(report.summary.errors) + " errors (" +
         std::to_string(report.summary.total()) + " total)\n";
  return out;
}

std::string export_bibtex(const Report& report) {
  CitationKeyAllocator keys;
  std::string out;
  for (const VerificationResult& result : report.results) {
    if (result.verdict == Verdict::NotFound || !result.corrected) continue;
    if (!out.empty()) out += "\n";
    out += generate_bibtex(*result.corrected, keys.allocate(*result.corrected));
    out += "\n";
  }
  return out;
}

}  // namespace refcheck
