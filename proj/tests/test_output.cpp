// Tests for report generation: APA formatting, per-result text rendering,
// the text and JSON report formats, BibTeX export, and conformance of the
// JSON output to the published schema.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "refcheck/bibtex.hpp"
#include "refcheck/output.hpp"
#include "refcheck/pipeline.hpp"
#include "refcheck/record.hpp"
#include "refcheck/scoring.hpp"

namespace {

using nlohmann::json;
using refcheck::Author;
using refcheck::BatchSummary;
using refcheck::CandidateRecord;
using refcheck::Issue;
using refcheck::IssueCode;
using refcheck::Report;
using refcheck::ReportFormat;
using refcheck::SourceId;
using refcheck::VerificationResult;
using refcheck::Verdict;

// Sets an environment variable for the lifetime of a scope, restoring the
// previous state afterwards.
class EnvGuard {
 public:
  EnvGuard(std::string name, const std::string& value)
      : name_(std::move(name)) {
    if (const char* old = std::getenv(name_.c_str())) previous_ = old;
    setenv(name_.c_str(), value.c_str(), 1);
  }
  ~EnvGuard() {
    if (previous_) {
      setenv(name_.c_str(), previous_->c_str(), 1);
    } else {
      unsetenv(name_.c_str());
    }
  }
  EnvGuard(const EnvGuard&) = delete;
  EnvGuard& operator=(const EnvGuard&) = delete;

 private:
  std::string name_;
  std::optional<std::string> previous_;
};

CandidateRecord study_record() {
  CandidateRecord record;
  record.source = SourceId::CrossRef;
  record.title = "A study";
  record.authors = {{"Doe", "Jane"}, {"Roe", "Richard"}};
  record.venue = "Nature";
  record.year = 2020;
  record.volume = "5";
  record.number = "2";
  record.pages = "1-10";
  record.doi = "10.1/x";
  record.record_type = "journal-article";
  return record;
}

VerificationResult verified_result() {
  VerificationResult result;
  result.input_text = "Doe (2020). A study. Nature.";
  result.verdict = Verdict::Verified;
  result.exists = true;
  result.confidence = refcheck::assemble_confidence(100.0, 0.0, {});
  result.corrected = study_record();
  result.apa = refcheck::format_apa(*result.corrected);
  result.bibtex = refcheck::generate_bibtex(
      *result.corrected, refcheck::generate_citation_key(*result.corrected));
  result.sources_consulted = {SourceId::CrossRef};
  return result;
}

VerificationResult not_found_result() {
  VerificationResult result;
  result.input_text = "Fabricato (2019). Imaginary Results.";
  result.verdict = Verdict::NotFound;
  result.exists = false;
  const std::vector<Issue> issues = {
      {IssueCode::NotFound, "no matching records found in any source", -20}};
  result.confidence = refcheck::assemble_confidence(0.0, 0.0, issues);
  result.issues = issues;
  result.sources_consulted = {SourceId::CrossRef, SourceId::SemanticScholar};
  result.warnings = {"no source returned a match"};
  return result;
}

Report two_result_report() {
  BatchSummary summary;
  summary.verified = 1;
  summary.not_found = 1;
  return refcheck::make_report({verified_result(), not_found_result()},
                               summary);
}

// --- Minimal JSON Schema checker (the subset report_schema.json uses) ---

const json* resolve_ref(const json& root, const std::string& ref) {
  if (ref.rfind("#/", 0) != 0) return nullptr;
  const json* node = &root;
  std::size_t pos = 2;
  while (pos < ref.size()) {
    const std::size_t slash = ref.find('/', pos);
    const std::string key =
        ref.substr(pos, slash == std::string::npos ? std::string::npos
                                                   : slash - pos);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  return node;
}

bool type_matches(const std::string& type, const json& value) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

bool validate_schema(const json& root, const json& schema, const json& value,
                     const std::string& path, std::string& error) {
  if (schema.contains("$ref")) {
    const json* target = resolve_ref(root, schema["$ref"].get<std::string>());
    if (target == nullptr) {
      error = path + ": unresolvable $ref " + schema["$ref"].get<std::string>();
      return false;
    }
    return validate_schema(root, *target, value, path, error);
  }

  if (schema.contains("oneOf")) {
    int matched = 0;
    for (const json& branch : schema["oneOf"]) {
      std::string branch_error;
      if (validate_schema(root, branch, value, path, branch_error)) ++matched;
    }
    if (matched != 1) {
      error = path + ": matched " + std::to_string(matched) +
              " oneOf branches instead of exactly one";
      return false;
    }
    return true;
  }

  if (schema.contains("enum")) {
    for (const json& allowed : schema["enum"]) {
      if (value == allowed) return true;
    }
    error = path + ": value " + value.dump() + " not in enum";
    return false;
  }

  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(type, value)) {
      error = path + ": expected type " + type + ", got " + value.dump();
      return false;
    }
  }

  if (schema.contains("pattern") && value.is_string()) {
    const std::regex re(schema["pattern"].get<std::string>());
    if (!std::regex_search(value.get<std::string>(), re)) {
      error = path + ": string does not match pattern";
      return false;
    }
  }

  if (value.is_number()) {
    const double number = value.get<double>();
    if (schema.contains("minimum") &&
        number < schema["minimum"].get<double>()) {
      error = path + ": " + value.dump() + " is below the minimum";
      return false;
    }
    if (schema.contains("maximum") &&
        number > schema["maximum"].get<double>()) {
      error = path + ": " + value.dump() + " is above the maximum";
      return false;
    }
  }

  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const json& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          error = path + ": missing required key " + key.get<std::string>();
          return false;
        }
      }
    }
    const json* properties =
        schema.contains("properties") ? &schema["properties"] : nullptr;
    if (schema.contains("additionalProperties") &&
        schema["additionalProperties"].is_boolean() &&
        !schema["additionalProperties"].get<bool>()) {
      for (const auto& [key, ignored] : value.items()) {
        (void)ignored;
        if (properties == nullptr || !properties->contains(key)) {
          error = path + ": unexpected key " + key;
          return false;
        }
      }
    }
    if (properties != nullptr) {
      for (const auto& [key, sub_schema] : properties->items()) {
        if (!value.contains(key)) continue;
        if (!validate_schema(root, sub_schema, value[key], path + "." + key,
                             error)) {
          return false;
        }
      }
    }
  }

  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const json& element : value) {
      if (!validate_schema(root, schema["items"], element,
                           path + "[" + std::to_string(i) + "]", error)) {
        return false;
      }
      ++i;
    }
  }

  return true;
}

json load_schema() {
  std::ifstream in(std::string(REFCHECK_DOCS_DIR) + "/report_schema.json");
  REQUIRE_MESSAGE(in.good(), "report schema document must be present");
  json schema;
  in >> schema;
  return schema;
}

}  // namespace

TEST_CASE("format_apa renders the documented examples") {
  SUBCASE("full journal article") {
    CHECK(refcheck::format_apa(study_record()) ==
          "Doe, J., & Roe, R. (2020). A study. Nature, 5(2), 1–10. "
          "https://doi.org/10.1/x");
  }

  SUBCASE("minimal article omits absent parts and their separators") {
    CandidateRecord record;
    record.title = "A study";
    record.authors = {{"Doe", "Jane"}};
    record.venue = "Nature";
    record.year = 2020;
    CHECK(refcheck::format_apa(record) == "Doe, J. (2020). A study. Nature.");
  }

  SUBCASE("21-plus authors keep 19, an ellipsis, and the final author") {
    CandidateRecord record;
    record.title = "A study";
    record.year = 2021;
    for (int i = 1; i <= 22; ++i) {
      char family[16];
      std::snprintf(family, sizeof(family), "Fam%02d", i);
      record.authors.push_back({family, "Ada"});
    }
    const std::string apa = refcheck::format_apa(record);
    CHECK(apa.rfind("Fam01, A., Fam02, A.", 0) == 0);
    CHECK(apa.find("Fam19, A., ... Fam22, A. (2021). A study.") !=
          std::string::npos);
    CHECK(apa.find("Fam20") == std::string::npos);
    CHECK(apa.find("Fam21") == std::string::npos);
  }

  SUBCASE("exactly 20 authors are all listed with an ampersand") {
    CandidateRecord record;
    record.title = "A study";
    for (int i = 1; i <= 20; ++i) {
      char family[16];
      std::snprintf(family, sizeof(family), "Fam%02d", i);
      record.authors.push_back({family, "Ada"});
    }
    const std::string apa = refcheck::format_apa(record);
    CHECK(apa.find("Fam19, A., & Fam20, A.") != std::string::npos);
    CHECK(apa.find("...") == std::string::npos);
  }
}

TEST_CASE("format_apa reduces given names to initials") {
  const auto apa_for = [](Author author) {
    CandidateRecord record;
    record.title = "T";
    record.authors = {std::move(author)};
    return refcheck::format_apa(record);
  };

  CHECK(apa_for({"Doe", "Jane"}) == "Doe, J. T.");
  CHECK(apa_for({"Doe", "Jane Q."}) == "Doe, J. Q. T.");
  CHECK(apa_for({"Devlin", "Ming-Wei"}) == "Devlin, M.-W. T.");
  CHECK(apa_for({"Doe", "J."}) == "Doe, J. T.");
  // Family-only and given-only authors degrade gracefully.
  CHECK(apa_for({"Madonna", ""}) == "Madonna T.");
  CHECK(apa_for({"", "Prince"}) == "P. T.");
}

TEST_CASE("format_apa handles punctuation and partial metadata") {
  SUBCASE("a title with terminal punctuation gains no extra period") {
    CandidateRecord record;
    record.title = "Does it work?";
    record.authors = {{"Doe", "Jane"}};
    record.year = 2020;
    record.venue = "Nature";
    CHECK(refcheck::format_apa(record) ==
          "Doe, J. (2020). Does it work? Nature.");
  }

  SUBCASE("page ranges are set with an en dash") {
    CandidateRecord record;
    record.title = "A study";
    record.pages = "100-110";
    CHECK(refcheck::format_apa(record) == "A study. 100–110.");
  }

  SUBCASE("no year places the title right after the authors") {
    CandidateRecord record;
    record.title = "A study";
    record.authors = {{"Doe", "Jane"}};
    CHECK(refcheck::format_apa(record) == "Doe, J. A study.");
  }

  SUBCASE("volume and issue without a venue still render") {
    CandidateRecord record;
    record.title = "A study";
    record.year = 2020;
    record.volume = "5";
    record.number = "2";
    CHECK(refcheck::format_apa(record) == "(2020). A study. 5(2).");
  }

  SUBCASE("an issue number without a volume is dropped") {
    CandidateRecord record;
    record.title = "A study";
    record.number = "2";
    CHECK(refcheck::format_apa(record) == "A study.");
  }

  SUBCASE("a record without a title is rejected") {
    CandidateRecord record;
    record.authors = {{"Doe", "Jane"}};
    CHECK_THROWS_AS(refcheck::format_apa(record), std::invalid_argument);
  }
}

TEST_CASE("current_timestamp_utc honors SOURCE_DATE_EPOCH") {
  EnvGuard guard("SOURCE_DATE_EPOCH", "1700000000");
  CHECK(refcheck::current_timestamp_utc() == "2023-11-14T22:13:20Z");
}

TEST_CASE("make_report stamps the version and timestamp") {
  EnvGuard guard("SOURCE_DATE_EPOCH", "1700000000");
  const Report report = two_result_report();
  CHECK(report.tool_version == "0.1.0");
  CHECK(report.generated_at == "2023-11-14T22:13:20Z");
  CHECK(report.summary.total() == 2);
  CHECK(report.results.size() == 2);
}

TEST_CASE("render_result_text shows verdict, issues, and citation") {
  SUBCASE("verified result") {
    const std::string text =
        refcheck::render_result_text(verified_result(), 0, 2);
    CHECK(text.rfind("[1/2] ✓ VERIFIED (confidence 100.0)\n", 0) == 0);
    CHECK(text.find("    input: Doe (2020). A study. Nature.\n") !=
          std::string::npos);
    CHECK(text.find("    apa: Doe, J., & Roe, R. (2020). A study. Nature, "
                    "5(2), 1–10. https://doi.org/10.1/x\n") !=
          std::string::npos);
    CHECK(text.find("    sources: CrossRef\n") != std::string::npos);
  }

  SUBCASE("not-found result") {
    const std::string text =
        refcheck::render_result_text(not_found_result(), 1, 2);
    CHECK(text.rfind("[2/2] ✗ NOT FOUND (confidence 0.0)\n", 0) == 0);
    CHECK(text.find("    issue: NotFound: no matching records found in any "
                    "source") != std::string::npos);
    CHECK(text.find("    sources: CrossRef, Semantic Scholar\n") !=
          std::string::npos);
    CHECK(text.find("    warning: no source returned a match\n") !=
          std::string::npos);
    // Nothing to cite.
    CHECK(text.find("    apa:") == std::string::npos);
  }

  SUBCASE("partial match uses the tilde marker") {
    VerificationResult result = verified_result();
    result.verdict = Verdict::PartialMatch;
    result.confidence = refcheck::assemble_confidence(
        77.5, 0.0,
        {{IssueCode::YearMismatch, "cited year 2010 but found 2011", -10}});
    const std::string text = refcheck::render_result_text(result, 0, 1);
    CHECK(text.rfind("[1/1] ~ PARTIAL MATCH (confidence 67.5)\n", 0) == 0);
  }

  SUBCASE("confirmed and suspect authors are listed") {
    VerificationResult result = verified_result();
    result.confirmed_authors = {"bengio", "goodfellow"};
    result.suspect_authors = {"fabricato"};
    const std::string text = refcheck::render_result_text(result, 0, 1);
    CHECK(text.find("    confirmed authors: bengio goodfellow\n") !=
          std::string::npos);
    CHECK(text.find("    suspect authors: fabricato\n") != std::string::npos);
  }
}

TEST_CASE("render_report text format ends with the summary line") {
  const Report report = two_result_report();
  const std::string text =
      refcheck::render_report(report, ReportFormat::Text);
  CHECK(text.find("[1/2] ✓ VERIFIED") != std::string::npos);
  CHECK(text.find("[2/2] ✗ NOT FOUND") != std::string::npos);
  const std::string summary_line =
      "Summary: 1 verified, 0 partial match, 1 not found, 0 errors (2 "
      "total)\n";
  REQUIRE(text.size() >= summary_line.size());
  CHECK(text.substr(text.size() - summary_line.size()) == summary_line);
}

TEST_CASE("render_report JSON carries the full result detail") {
  EnvGuard guard("SOURCE_DATE_EPOCH", "1700000000");
  const Report report = two_result_report();
  const std::string rendered =
      refcheck::render_report(report, ReportFormat::Json);
  const json doc = json::parse(rendered);

  CHECK(doc["tool"] == "refcheck");
  CHECK(doc["version"] == "0.1.0");
  CHECK(doc["generated_at"] == "2023-11-14T22:13:20Z");
  CHECK(doc["summary"]["total"] == 2);
  CHECK(doc["summary"]["verified"] == 1);
  CHECK(doc["summary"]["partial_match"] == 0);
  CHECK(doc["summary"]["not_found"] == 1);
  CHECK(doc["summary"]["errors"] == 0);

  REQUIRE(doc["results"].size() == 2);
  const json& first = doc["results"][0];
  CHECK(first["index"] == 0);
  CHECK(first["verdict"] == "verified");
  CHECK(first["exists"] == true);
  CHECK(first["confidence"] == doctest::Approx(100.0));
  CHECK(first["confidence_breakdown"]["base"] == doctest::Approx(100.0));
  CHECK(first["confidence_breakdown"]["bonus"] == doctest::Approx(0.0));
  CHECK(first["confidence_breakdown"]["penalty_total"] ==
        doctest::Approx(0.0));
  CHECK(first["issues"].empty());
  CHECK(first["corrected"]["source"] == "crossref");
  CHECK(first["corrected"]["title"] == "A study");
  CHECK(first["corrected"]["authors"][0]["family"] == "Doe");
  CHECK(first["corrected"]["authors"][0]["given"] == "Jane");
  CHECK(first["corrected"]["year"] == 2020);
  CHECK(first["corrected"]["doi"] == "10.1/x");
  CHECK(first["sources_consulted"] == json::array({"crossref"}));

  const json& second = doc["results"][1];
  CHECK(second["index"] == 1);
  CHECK(second["verdict"] == "not_found");
  CHECK(second["exists"] == false);
  CHECK(second["confidence"] == doctest::Approx(0.0));
  CHECK(second["confidence_breakdown"]["penalty_total"] ==
        doctest::Approx(-20.0));
  REQUIRE(second["issues"].size() == 1);
  CHECK(second["issues"][0]["code"] == "NotFound");
  CHECK(second["issues"][0]["penalty"] == doctest::Approx(-20.0));
  CHECK(second["corrected"].is_null());
  CHECK(second["apa"] == "");
  CHECK(second["sources_consulted"] ==
        json::array({"crossref", "semantic_scholar"}));
}

TEST_CASE("render_report JSON rounds scores to two decimals") {
  VerificationResult result = verified_result();
  result.confidence = refcheck::assemble_confidence(88.888888, 0.0, {});
  result.verdict = refcheck::classify(result.confidence.value, true);
  BatchSummary summary;
  summary.verified = 1;
  const Report report = refcheck::make_report({result}, summary);
  const json doc =
      json::parse(refcheck::render_report(report, ReportFormat::Json));
  CHECK(doc["results"][0]["confidence"] == doctest::Approx(88.89));
  CHECK(doc["results"][0]["confidence_breakdown"]["base"] ==
        doctest::Approx(88.89));
}

TEST_CASE("render_report is byte-deterministic for identical content") {
  EnvGuard guard("SOURCE_DATE_EPOCH", "1700000000");
  const Report first = two_result_report();
  const Report second = two_result_report();
  CHECK(refcheck::render_report(first, ReportFormat::Json) ==
        refcheck::render_report(second, ReportFormat::Json));
  CHECK(refcheck::render_report(first, ReportFormat::Text) ==
        refcheck::render_report(second, ReportFormat::Text));
}

TEST_CASE("an empty report renders cleanly in both formats") {
  const Report report = refcheck::make_report({}, BatchSummary{});
  const std::string text =
      refcheck::render_report(report, ReportFormat::Text);
  CHECK(text ==
        "Summary: 0 verified, 0 partial match, 0 not found, 0 errors (0 "
        "total)\n");
  const json doc =
      json::parse(refcheck::render_report(report, ReportFormat::Json));
  CHECK(doc["results"].is_array());
  CHECK(doc["results"].empty());
  CHECK(doc["summary"]["total"] == 0);
}

TEST_CASE("export_bibtex keeps only correctable results with unique keys") {
  SUBCASE("not-found results are skipped and colliding keys get suffixes") {
    VerificationResult first = verified_result();
    VerificationResult second = verified_result();
    VerificationResult third = not_found_result();
    BatchSummary summary;
    summary.verified = 2;
    summary.not_found = 1;
    const Report report =
        refcheck::make_report({first, second, third}, summary);

    const std::string exported = refcheck::export_bibtex(report);
    CHECK(exported.find("@article{doe2020study,") != std::string::npos);
    CHECK(exported.find("@article{doe2020studya,") != std::string::npos);
    CHECK(exported.find("Fabricato") == std::string::npos);

    // The exported text must itself be valid BibTeX.
    const auto reparsed = refcheck::parse_bibtex(exported);
    CHECK(reparsed.references.size() == 2);
    CHECK(reparsed.warnings.empty());
    CHECK(reparsed.references[0].title == "A study");
  }

  SUBCASE("a report with nothing verifiable exports nothing") {
    BatchSummary summary;
    summary.not_found = 1;
    const Report report = refcheck::make_report({not_found_result()}, summary);
    CHECK(refcheck::export_bibtex(report).empty());
  }
}

TEST_CASE("the JSON report conforms to the published schema") {
  const json schema = load_schema();

  EnvGuard guard("SOURCE_DATE_EPOCH", "1700000000");
  Report report = two_result_report();
  // Exercise the optional fields too.
  report.results[0].confirmed_authors = {"doe", "roe"};
  report.results[0].suspect_authors = {"fabricato"};
  report.results[0].warnings = {"sample warning"};
  const json doc =
      json::parse(refcheck::render_report(report, ReportFormat::Json));

  std::string error;
  const bool valid = validate_schema(schema, schema, doc, "$", error);
  CAPTURE(error);
  CHECK(valid);

  SUBCASE("the checker rejects unexpected keys") {
    json broken = doc;
    broken["summary"]["extra"] = 1;
    CHECK_FALSE(validate_schema(schema, schema, broken, "$", error));
  }

  SUBCASE("the checker rejects out-of-vocabulary verdicts") {
    json broken = doc;
    broken["results"][0]["verdict"] = "unsure";
    CHECK_FALSE(validate_schema(schema, schema, broken, "$", error));
  }

  SUBCASE("the checker rejects missing required keys") {
    json broken = doc;
    broken["results"][0].erase("apa");
    CHECK_FALSE(validate_schema(schema, schema, broken, "$", error));
  }

  SUBCASE("the checker rejects positive penalties") {
    json broken = doc;
    broken["results"][1]["issues"][0]["penalty"] = 5;
    CHECK_FALSE(validate_schema(schema, schema, broken, "$", error));
  }
}
