// refcheck CLI: verify bibliographic references against CrossRef,
// Semantic Scholar, and OpenAlex, and emit corrected citations.

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "refcheck/http.hpp"
#include "refcheck/output.hpp"
#include "refcheck/pipeline.hpp"
#include "refcheck/scoring.hpp"
#include "refcheck/version.hpp"

namespace {

constexpr int kExitVerified = 0;
constexpr int kExitProblems = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnreachable = 3;

struct InputText {
  std::string text;
  std::optional<std::string> error;
};

InputText resolve_input(const std::string& arg) {
  InputText out;
  if (arg == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    out.text = buffer.str();
    return out;
  }
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream file(arg, std::ios::binary);
    if (!file) {
      out.error = "cannot read input file: " + arg;
      return out;
    }
    out.text.assign(std::istreambuf_iterator<char>(file),
                    std::istreambuf_iterator<char>());
    if (file.bad()) {
      out.error = "cannot read input file: " + arg;
      return out;
    }
    return out;
  }
  // Not stdin and not an existing file: treat the argument itself as the
  // reference text.
  out.text = arg;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Verify bibliographic references against CrossRef, Semantic Scholar, "
      "and OpenAlex, and emit corrected APA and BibTeX citations."};
  app.set_version_flag("--version", std::string(refcheck::kToolVersion));

  std::string input_arg;
  app.add_option("input", input_arg,
                 "Reference input: '-' reads stdin, an existing file is "
                 "read, anything else is taken as literal reference text")
      ->required();

  std::string mode = "auto";
  app.add_option("--mode", mode,
                 "quick: first reference only, no rate limiting; batch: all "
                 "references with rate limiting; auto: quick for single "
                 "free-text input, batch for BibTeX or multi-line input")
      ->check(CLI::IsMember({"quick", "batch", "auto"}));

  std::string format = "text";
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"text", "json"}));

  std::string export_path;
  app.add_option("--export", export_path,
                 "Write corrected BibTeX for all non-NOT-FOUND references "
                 "to this file");

  int rate_limit_ms = 800;
  app.add_option("--rate-limit-ms", rate_limit_ms,
                 "Minimum spacing between same-source requests in batch "
                 "mode (milliseconds)")
      ->check(CLI::NonNegativeNumber);

  std::string offline_dir;
  app.add_option("--offline", offline_dir,
                 "Serve responses from this fixture directory instead of "
                 "the network")
      ->envname("REFCHECK_OFFLINE");

  std::string contact;
  app.add_option("--contact", contact,
                 "Contact email attached to API requests (polite pools)")
      ->envname("REFCHECK_CONTACT");

  int max_refs = 500;
  app.add_option("--max-refs", max_refs,
                 "Refuse inputs with more references than this")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/version or the error
    return code == 0 ? 0 : kExitUsage;
  }

  const InputText input = resolve_input(input_arg);
  if (input.error) {
    std::cerr << "error: " << *input.error << "\n";
    return kExitUsage;
  }

  refcheck::PreparedInput prepared;
  try {
    prepared = refcheck::prepare_input(input.text);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const std::string& warning : prepared.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  if (prepared.references.empty()) {
    std::cerr << "error: input contains no usable references\n";
    return kExitUsage;
  }

  std::vector<refcheck::Reference> refs = std::move(prepared.references);
  if (mode == "auto") {
    mode = prepared.kind == refcheck::InputKind::FreeTextSingle ? "quick"
                                                                : "batch";
  }
  if (mode == "quick" && refs.size() > 1) {
    std::cerr << "warning: quick mode processes only the first of "
              << refs.size() << " references\n";
    refs.resize(1);
  }
  if (refs.size() > static_cast<std::size_t>(max_refs)) {
    std::cerr << "error: input contains " << refs.size()
              << " references, more than the --max-refs limit of " << max_refs
              << "\n";
    return kExitUsage;
  }

  std::unique_ptr<refcheck::Transport> transport;
  if (!offline_dir.empty()) {
    std::error_code ec;
    if (!std::filesystem::is_directory(offline_dir, ec)) {
      std::cerr << "error: offline fixture directory not found: "
                << offline_dir << "\n";
      return kExitUsage;
    }
    auto fixtures = std::make_unique<refcheck::FixtureTransport>(offline_dir);
    for (const std::string& warning : fixtures->load_warnings()) {
      std::cerr << "warning: " << warning << "\n";
    }
    transport = std::move(fixtures);
  } else {
    transport = std::make_unique<refcheck::LiveTransport>();
  }

  refcheck::PipelineConfig config;
  config.rate_interval = std::chrono::milliseconds(rate_limit_ms);
  config.batch_mode = mode == "batch";
  if (!contact.empty()) config.contact = contact;

  refcheck::Pipeline pipeline(*transport, config);

  const bool text_format = format == "text";
  const std::size_t total = refs.size();
  std::vector<refcheck::VerificationResult> results;
  results.reserve(total);

  const refcheck::BatchSummary summary = pipeline.verify_batch(
      refs, [&](std::size_t index, const refcheck::VerificationResult& result) {
        std::cerr << "[" << index + 1 << "/" << total << "] "
                  << refcheck::verdict_label(result.verdict) << "\n";
        if (text_format) {
          std::cout << refcheck::render_result_text(result, index, total)
                    << "\n"
                    << std::flush;
        }
        results.push_back(result);
      });

  const refcheck::Report report =
      refcheck::make_report(std::move(results), summary);

  if (text_format) {
    // The per-reference blocks were already streamed; finish with the
    // summary line.
    refcheck::Report tail;
    tail.summary = report.summary;
    std::cout << refcheck::render_report(tail, refcheck::ReportFormat::Text);
  } else {
    std::cout << refcheck::render_report(report, refcheck::ReportFormat::Json);
  }

  if (!export_path.empty()) {
    std::ofstream out(export_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write export file: " << export_path << "\n";
      return kExitUsage;
    }
    out << refcheck::export_bibtex(report);
    out.close();
    if (!out) {
      std::cerr << "error: cannot write export file: " << export_path << "\n";
      return kExitUsage;
    }
  }

  if (pipeline.requests_attempted() > 0 && pipeline.requests_succeeded() == 0) {
    std::cerr << "error: all sources unreachable\n";
    return kExitUnreachable;
  }
  const bool all_verified = report.summary.partial == 0 &&
                            report.summary.not_found == 0 &&
                            report.summary.errors == 0;
  return all_verified ? kExitVerified : kExitProblems;
}
