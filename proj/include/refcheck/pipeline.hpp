#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refcheck/bibtex.hpp"
#include "refcheck/http.hpp"
#include "refcheck/matching.hpp"
#include "refcheck/record.hpp"
#include "refcheck/scoring.hpp"
#include "refcheck/sources.hpp"

namespace refcheck {

// Final verdict for one reference.
struct VerificationResult {
  std::string input_text;  // the LaTeX-filtered input unit
  bool exists = false;     // always equals confidence.value > 50
  Confidence confidence;
  Verdict verdict = Verdict::NotFound;
  std::vector<Issue> issues;
  std::vector<std::string> confirmed_authors;  // sorted normalized family names
  std::vector<std::string> suspect_authors;    // sorted, disjoint from confirmed
  std::optional<CandidateRecord> corrected;    // present iff verdict != NotFound
  std::string apa;
  std::string bibtex;
  std::vector<SourceId> sources_consulted;
  std::vector<std::string> warnings;
  std::chrono::milliseconds elapsed{0};
};

struct BatchSummary {
  int verified = 0;
  int partial = 0;
  int not_found = 0;
  int errors = 0;

  int total() const { return verified + partial + not_found + errors; }
};

// Author cross-validation over the sources that returned a matching record;
// absent sources (nullopt) are excluded from the intersection.
//   confirmed = intersection over contributing sources' family-name sets
//   suspect   = union of those sets minus confirmed
std::pair<std::set<std::string>, std::set<std::string>> cross_validate_authors(
    const std::optional<std::vector<std::string>>& crossref,
    const std::optional<std::vector<std::string>>& semantic_scholar,
    const std::optional<std::vector<std::string>>& openalex);

struct MergeOutcome {
  CandidateRecord record;
  std::optional<std::string> warning;  // set when sources disagree on the DOI
};

// Field-wise precedence CrossRef > Semantic Scholar > OpenAlex for
// title/venue/year/volume/number/pages/type; the DOI comes from the highest-
// precedence source carrying one, with a warning when normalized DOIs
// disagree; the author list is taken from the highest-precedence
// contributing source whose family-name set covers every confirmed author,
// defaulting to the highest-precedence record.  Throws std::invalid_argument
// when no record is present.
MergeOutcome merge_metadata(const std::optional<CandidateRecord>& crossref,
                            const std::optional<CandidateRecord>& semantic_scholar,
                            const std::optional<CandidateRecord>& openalex,
                            const std::set<std::string>& confirmed_authors);

struct PipelineConfig {
  // Spacing between same-source request starts; applied in batch mode only.
  std::chrono::milliseconds rate_interval{800};
  bool batch_mode = false;
  std::optional<std::string> contact;
  std::chrono::milliseconds timeout{10000};
  std::chrono::milliseconds retry_backoff{1000};
};

class Pipeline {
 public:
  Pipeline(Transport& transport, PipelineConfig config);

  // Runs the full verification cascade for one reference: primary CrossRef
  // query (Semantic Scholar when it returns nothing), candidate evaluation,
  // issue detection, the low-confidence/issue fallback with author
  // cross-validation + metadata merge + multi-source bonus, penalty
  // application, classification, and output generation.
  VerificationResult verify_reference(const Reference& ref);

  using EmitCallback =
      std::function<void(std::size_t index, const VerificationResult& result)>;

  // Sequential, input-order processing; emit fires once per completed
  // reference.  Per-item failures become error results, never batch aborts.
  BatchSummary verify_batch(const std::vector<Reference>& refs,
                            const EmitCallback& emit);

  int requests_attempted() const { return attempted_.load(); }
  int requests_succeeded() const { return succeeded_.load(); }

 private:
  VerificationResult run_cascade(const Reference& ref, SourceClient& client);

  Transport& transport_;
  PipelineConfig config_;
  RateLimiter limiter_;
  std::atomic<int> attempted_{0};
  std::atomic<int> succeeded_{0};
};

// Input preparation shared by the CLI and tests: detect the input kind on
// the raw text, split it into units (BibTeX entries or non-empty lines),
// and LaTeX-filter each unit.  Throws std::invalid_argument on blank input.
struct PreparedInput {
  InputKind kind = InputKind::FreeTextSingle;
  std::vector<Reference> references;
  std::vector<std::string> warnings;
};

PreparedInput prepare_input(std::string_view text);

}  // namespace refcheck
