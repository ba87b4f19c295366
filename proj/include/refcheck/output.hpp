#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "refcheck/pipeline.hpp"
#include "refcheck/record.hpp"

namespace refcheck {

// A finished batch, ready for rendering.
struct Report {
  std::vector<VerificationResult> results;
  BatchSummary summary;
  std::string generated_at;  // ISO-8601 UTC, second precision
  std::string tool_version;
};

enum class ReportFormat { Text, Json };

// UTC timestamp for report headers.  Honors SOURCE_DATE_EPOCH (seconds) so
// runs can be made byte-reproducible.
std::string current_timestamp_utc();

// Bundles results + summary with the version and timestamp filled in.
Report make_report(std::vector<VerificationResult> results, BatchSummary summary);

// APA 7th edition journal-article reference:
//   "Family, I. I., & Family, I. I. (Year). Title. Venue, Volume(Issue),
//    Pages. https://doi.org/DOI"
// Given names are reduced to initials; 21+ author lists keep the first 19,
// an ellipsis, and the final author; absent fields and their separators are
// omitted; page ranges use an en dash; no period after the DOI.  Throws
// std::invalid_argument when the record has no title.
std::string format_apa(const CandidateRecord& record);

// One text block for a single result, used for progressive emission; the
// index is 0-based, total is the batch size.
std::string render_result_text(const VerificationResult& result,
                               std::size_t index, std::size_t total);

// Full report: text = the blocks above plus a summary line; json = the
// stable schema documented in docs/report_schema.json.  Byte-deterministic
// for identical report content.
std::string render_report(const Report& report, ReportFormat format);

// Corrected BibTeX entries for every non-NotFound result, in input order,
// blank-line separated, with batch-unique citation keys.
std::string export_bibtex(const Report& report);

}  // namespace refcheck
