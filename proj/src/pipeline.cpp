#include "refcheck/pipeline.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "refcheck/latex_filter.hpp"
#include "refcheck/output.hpp"
#include "refcheck/similarity.hpp"

namespace refcheck {

namespace {

std::optional<std::vector<std::string>> family_names_of(
    const std::optional<CandidateRecord>& record) {
  if (!record) return std::nullopt;
  std::vector<std::string> names;
  names.reserve(record->authors.size());
  for (const Author& author : record->authors) {
    std::string family = normalize(author.family);
    if (!family.empty()) names.push_back(std::move(family));
  }
  return names;
}

bool family_set_covers(const std::vector<std::string>& families,
                       const std::set<std::string>& confirmed) {
  for (const std::string& name : confirmed) {
    if (std::find(families.begin(), families.end(), name) == families.end()) {
      return false;
    }
  }
  return true;
}

void push_unique_source(std::vector<SourceId>& sources, SourceId source) {
  if (std::find(sources.begin(), sources.end(), source) == sources.end()) {
    sources.push_back(source);
  }
}

void push_unique_warning(std::vector<std::string>& warnings,
                         const std::optional<std::string>& warning) {
  if (!warning) return;
  if (std::find(warnings.begin(), warnings.end(), *warning) == warnings.end()) {
    warnings.push_back(*warning);
  }
}

// Refines FakeAuthor severities once cross-validation data exists: a token
// absent from >= 2 contributing sources' author sets is a strong signal
// (-20); absent from exactly one keeps the mild -10; present in every
// contributing source clears the flag entirely.
void adjust_fake_author_issues(
    MatchEvaluation& eval,
    const std::vector<std::vector<std::string>>& contributing_family_sets) {
  if (contributing_family_sets.empty()) return;
  std::vector<std::string> kept_tokens;
  std::vector<Issue> kept_issues;
  for (const Issue& issue : eval.issues) {
    if (issue.code != IssueCode::FakeAuthor) {
      kept_issues.push_back(issue);
    }
  }
  for (const std::string& token : eval.fake_author_tokens) {
    const std::string norm = normalize(token);
    int missing = 0;
    for (const std::vector<std::string>& families : contributing_family_sets) {
      bool found = false;
      for (const std::string& family : families) {
        if (family.find(norm) != std::string::npos ||
            norm.find(family) != std::string::npos) {
          found = true;
          break;
        }
      }
      if (!found) ++missing;
    }
    if (missing == 0) continue;  // every source knows this author
    Issue issue{IssueCode::FakeAuthor,
                "author token '" + token + "' is absent from " +
                    std::to_string(missing) + " of " +
                    std::to_string(contributing_family_sets.size()) +
                    " contributing sources",
                missing >= 2 ? -20 : -10};
    kept_issues.push_back(std::move(issue));
    kept_tokens.push_back(token);
  }
  eval.fake_author_tokens = std::move(kept_tokens);
  eval.issues = std::move(kept_issues);
}

}  // namespace

std::pair<std::set<std::string>, std::set<std::string>> cross_validate_authors(
    const std::optional<std::vector<std::string>>& crossref,
    const std::optional<std::vector<std::string>>& semantic_scholar,
    const std::optional<std::vector<std::string>>& openalex) {
  std::vector<const std::vector<std::string>*> contributing;
  for (const auto* source : {&crossref, &semantic_scholar, &openalex}) {
    if (source->has_value()) contributing.push_back(&**source);
  }
  std::set<std::string> confirmed;
  std::set<std::string> all;
  if (contributing.empty()) return {confirmed, all};

  confirmed.insert(contributing.front()->begin(), contributing.front()->end());
  for (const std::vector<std::string>* families : contributing) {
    all.insert(families->begin(), families->end());
  }
  for (std::size_t i = 1; i < contributing.size(); ++i) {
    std::set<std::string> next;
    for (const std::string& name : *contributing[i]) {
      if (confirmed.count(name) != 0) next.insert(name);
    }
    confirmed = std::move(next);
  }
  std::set<std::string> suspect;
  for (const std::string& name : all) {
    if (confirmed.count(name) == 0) suspect.insert(name);
  }
  return {confirmed, suspect};
}

MergeOutcome merge_metadata(const std::optional<CandidateRecord>& crossref,
                            const std::optional<CandidateRecord>& semantic_scholar,
                            const std::optional<CandidateRecord>& openalex,
                            const std::set<std::string>& confirmed_authors) {
  std::vector<const CandidateRecord*> present;
  for (const auto* source : {&crossref, &semantic_scholar, &openalex}) {
    if (source->has_value()) present.push_back(&**source);
  }
  if (present.empty()) {
    throw std::invalid_argument("no records to merge");
  }

  MergeOutcome outcome;
  CandidateRecord& merged = outcome.record;
  merged = *present.front();

  const auto pick_string = [&present](
      std::optional<std::string> CandidateRecord::*field)
      -> std::optional<std::string> {
    for (const CandidateRecord* record : present) {
      const std::optional<std::string>& value = record->*field;
      if (value && !value->empty()) return value;
    }
    return std::nullopt;
  };
  merged.venue = pick_string(&CandidateRecord::venue);
  merged.volume = pick_string(&CandidateRecord::volume);
  merged.number = pick_string(&CandidateRecord::number);
  merged.pages = pick_string(&CandidateRecord::pages);
  merged.record_type = pick_string(&CandidateRecord::record_type);
  merged.year = std::nullopt;
  for (const CandidateRecord* record : present) {
    if (record->year) {
      merged.year = record->year;
      break;
    }
  }

  // DOI: highest-precedence value wins; disagreement is worth a warning.
  merged.doi = std::nullopt;
  std::vector<std::pair<std::string, SourceId>> dois;
  for (const CandidateRecord* record : present) {
    if (!record->doi || record->doi->empty()) continue;
    if (!merged.doi) merged.doi = record->doi;
    bool known = false;
    for (const auto& [value, source] : dois) {
      if (value == *record->doi) known = true;
    }
    if (!known) dois.emplace_back(*record->doi, record->source);
  }
  if (dois.size() > 1) {
    std::string warning = "sources disagree on the DOI: ";
    for (std::size_t i = 0; i < dois.size(); ++i) {
      if (i > 0) warning += " vs ";
      warning += dois[i].first;
      warning += " (";
      warning += source_label(dois[i].second);
      warning += ")";
    }
    warning += "; keeping " + *merged.doi;
    outcome.warning = std::move(warning);
  }

  // Author list: highest-precedence source covering every confirmed author.
  const CandidateRecord* author_source = present.front();
  for (const CandidateRecord* record : present) {
    const auto families = family_names_of(*record);
    if (families && family_set_covers(*families, confirmed_authors)) {
      author_source = record;
      break;
    }
  }
  merged.authors = author_source->authors;
  return outcome;
}

Pipeline::Pipeline(Transport& transport, PipelineConfig config)
    : transport_(transport),
      config_(std::move(config)),
      limiter_(config_.batch_mode ? config_.rate_interval
                                  : std::chrono::milliseconds(0)) {}

VerificationResult Pipeline::verify_reference(const Reference& ref) {
  const auto start = std::chrono::steady_clock::now();
  SourceClientConfig client_config;
  client_config.contact = config_.contact;
  client_config.timeout = config_.timeout;
  client_config.retry_backoff = config_.retry_backoff;
  SourceClient client(transport_, limiter_, client_config);

  VerificationResult result = run_cascade(ref, client);

  attempted_.fetch_add(client.requests_attempted());
  succeeded_.fetch_add(client.requests_succeeded());
  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return result;
}

VerificationResult Pipeline::run_cascade(const Reference& ref,
                                         SourceClient& client) {
  VerificationResult result;
  result.input_text = ref.raw_text;

  const std::string query = build_query(ref);

  // Primary: CrossRef; Semantic Scholar steps in when CrossRef is empty.
  const SearchOutcome crossref = client.search(SourceId::CrossRef, query);
  result.sources_consulted.push_back(SourceId::CrossRef);
  push_unique_warning(result.warnings, crossref.warning);

  std::vector<CandidateRecord> candidates = crossref.records;
  if (candidates.empty()) {
    const SearchOutcome fallback =
        client.search(SourceId::SemanticScholar, query);
    push_unique_source(result.sources_consulted, SourceId::SemanticScholar);
    push_unique_warning(result.warnings, fallback.warning);
    candidates = fallback.records;
  }

  if (candidates.empty()) {
    result.issues.push_back({IssueCode::NotFound,
                             "no matching records found in any source", -20});
    result.confidence = assemble_confidence(0.0, 0.0, result.issues);
    result.verdict = Verdict::NotFound;
    result.exists = false;
    return result;
  }

  auto [best, eval] = evaluate_candidates(ref, candidates);
  eval.issues = detect_issues(ref, best, eval);
  double base = base_confidence(eval, ref.structured());

  CandidateRecord corrected = best;
  std::set<std::string> confirmed;
  std::set<std::string> suspect;
  double bonus = 0.0;

  if (base < 70.0 || !eval.issues.empty()) {
    // Fallback phase: both secondary sources; no data dependency between
    // them, so they may run concurrently.  Warnings keep a fixed order.
    auto semantic_future = std::async(std::launch::async, [&client, &query] {
      return client.search(SourceId::SemanticScholar, query);
    });
    auto openalex_future = std::async(std::launch::async, [&client, &query] {
      return client.search(SourceId::OpenAlex, query);
    });
    const SearchOutcome semantic = semantic_future.get();
    const SearchOutcome openalex = openalex_future.get();
    push_unique_source(result.sources_consulted, SourceId::SemanticScholar);
    push_unique_source(result.sources_consulted, SourceId::OpenAlex);
    push_unique_warning(result.warnings, semantic.warning);
    push_unique_warning(result.warnings, openalex.warning);

    const auto best_of = [&ref](const std::vector<CandidateRecord>& records)
        -> std::optional<CandidateRecord> {
      if (records.empty()) return std::nullopt;
      return evaluate_candidates(ref, records).first;
    };
    const std::optional<CandidateRecord> crossref_best = best_of(crossref.records);
    const std::optional<CandidateRecord> semantic_best = best_of(semantic.records);
    const std::optional<CandidateRecord> openalex_best = best_of(openalex.records);

    const auto crossref_families = family_names_of(crossref_best);
    const auto semantic_families = family_names_of(semantic_best);
    const auto openalex_families = family_names_of(openalex_best);
    std::tie(confirmed, suspect) = cross_validate_authors(
        crossref_families, semantic_families, openalex_families);

    std::vector<std::vector<std::string>> contributing_sets;
    for (const auto* families :
         {&crossref_families, &semantic_families, &openalex_families}) {
      if (families->has_value()) contributing_sets.push_back(**families);
    }

    // Multi-source confirmation needs at least two agreeing sources.
    if (contributing_sets.size() >= 2) bonus = multi_source_bonus(confirmed);

    MergeOutcome merged = merge_metadata(crossref_best, semantic_best,
                                         openalex_best, confirmed);
    corrected = std::move(merged.record);
    push_unique_warning(result.warnings, merged.warning);

    // Penalties must reflect the corrected metadata the user receives.
    eval = evaluate_single(ref, corrected);
    eval.issues = detect_issues(ref, corrected, eval);
    adjust_fake_author_issues(eval, contributing_sets);
    base = base_confidence(eval, ref.structured());

    if (!suspect.empty()) {
      std::string warning = "authors not confirmed by every source:";
      for (const std::string& name : suspect) warning += " " + name;
      push_unique_warning(result.warnings, warning);
    }
  }

  // The fabricated tokens the query carries are suspects too.
  for (const std::string& token : eval.fake_author_tokens) {
    const std::string norm = normalize(token);
    if (!norm.empty() && confirmed.count(norm) == 0) suspect.insert(norm);
  }

  result.issues = eval.issues;
  result.confidence = assemble_confidence(base, bonus, result.issues);
  result.verdict = classify(result.confidence.value, true);
  result.exists = result.confidence.value > 50.0;
  result.confirmed_authors.assign(confirmed.begin(), confirmed.end());
  result.suspect_authors.assign(suspect.begin(), suspect.end());

  if (result.verdict != Verdict::NotFound) {
    result.corrected = corrected;
    result.apa = format_apa(corrected);
    result.bibtex = generate_bibtex(corrected, generate_citation_key(corrected));
  }
  return result;
}

BatchSummary Pipeline::verify_batch(const std::vector<Reference>& refs,
                                    const EmitCallback& emit) {
  BatchSummary summary;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    VerificationResult result;
    bool errored = false;
    try {
      result = verify_reference(refs[i]);
    } catch (const std::exception& e) {
      errored = true;
      result = VerificationResult{};
      result.input_text = refs[i].raw_text;
      result.verdict = Verdict::NotFound;
      result.confidence = assemble_confidence(0.0, 0.0, {});
      result.warnings.push_back(std::string("processing error: ") + e.what());
      ++summary.errors;
    }
    if (!errored) {
      switch (result.verdict) {
        case Verdict::Verified:
          ++summary.verified;
          break;
        case Verdict::PartialMatch:
          ++summary.partial;
          break;
        case Verdict::NotFound:
          ++summary.not_found;
          break;
      }
    }
    if (emit) emit(i, result);
  }
  return summary;
}

PreparedInput prepare_input(std::string_view text) {
  PreparedInput prepared;
  prepared.kind = detect_input_kind(text);  // throws on blank input

  if (prepared.kind == InputKind::BibTeX) {
    ParseResult parsed = parse_bibtex(text);
    prepared.references = std::move(parsed.references);
    prepared.warnings = std::move(parsed.warnings);
    return prepared;
  }

  std::size_t pos = 0;
  std::size_t line_number = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    ++line_number;

    bool blank = true;
    for (const char c : line) {
      if (c != ' ' && c != '\t' && c != '\r') {
        blank = false;
        break;
      }
    }
    if (!blank) {
      std::string filtered = filter_latex(line);
      if (filtered.empty()) {
        prepared.warnings.push_back("line " + std::to_string(line_number) +
                                    " is empty after LaTeX filtering");
      } else {
        Reference ref;
        ref.raw_text = std::move(filtered);
        prepared.references.push_back(std::move(ref));
      }
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return prepared;
}

}  // namespace refcheck
