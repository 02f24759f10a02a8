#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gecforge/align.hpp"
#include "gecforge/corpus.hpp"
#include "gecforge/exam.hpp"
#include "gecforge/llm/client.hpp"
#include "gecforge/llm/prompt.hpp"
#include "gecforge/metrics.hpp"
#include "gecforge/verdict.hpp"

namespace gecforge::see {

struct EditJudgment {
  std::string sample_id;
  std::size_t edit_index = 0;
  EditVerdict verdict = EditVerdict::WrongEdit;
  std::string rationale;

  friend bool operator==(const EditJudgment&, const EditJudgment&) = default;
};

nlohmann::ordered_json to_json(const EditJudgment& j);

/// n_ce + n_we + n_re is the predicted edit count; n_golden is the size of
/// the selected reference's gold edit set.
struct SentenceCounts {
  std::size_t n_ce = 0;
  std::size_t n_we = 0;
  std::size_t n_re = 0;
  std::size_t n_golden = 0;

  SentenceCounts& operator+=(const SentenceCounts& o) {
    n_ce += o.n_ce, n_we += o.n_we, n_re += o.n_re, n_golden += o.n_golden;
    return *this;
  }
  friend bool operator==(const SentenceCounts&, const SentenceCounts&) = default;
};

using SeeReport = metrics::BasicScoreReport<SentenceCounts>;

nlohmann::ordered_json to_json(const SentenceCounts& c);
nlohmann::ordered_json to_json(const SeeReport& report);

/// One line per edit: `i: [start, end) original -> replacement`, with
/// "(none)" standing for an empty side.
std::string render_edit_list(const align::EditSet& predicted, const align::Tokens& source);

/// Block shown to the judge when explanations are enabled.
std::string render_explanation(const exam::ExplanationRecord& record);

struct JudgeOptions {
  std::string model = "gpt-4-turbo";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

llm::LlmRequest build_judge_request(const corpus::CorrectionSample& sample, const std::string& hypothesis,
                                    const align::EditSet& predicted, const std::string& gold_reference,
                                    const exam::ExplanationRecord* explanation, const llm::PromptLibrary& prompts,
                                    const JudgeOptions& options);

/// All edits of a sentence in one call, one repair call when the reply is
/// unparseable or incomplete, then JudgmentFailed. No call for zero edits.
std::vector<EditJudgment> judge_edits(const corpus::CorrectionSample& sample, const std::string& hypothesis,
                                      const align::EditSet& predicted, const std::string& gold_reference,
                                      const exam::ExplanationRecord* explanation, llm::LlmClient& client,
                                      const llm::PromptLibrary& prompts, const JudgeOptions& options);

/// Reference whose gold edits share the most exact matches with `predicted`
/// (ties: lowest index). nullopt when there are no references.
std::optional<std::size_t> select_reference(const align::EditSet& predicted,
                                            const std::vector<align::EditSet>& gold_sets);

/// Throws CoverageError unless every predicted edit has exactly one judgment.
SentenceCounts tally(const std::vector<EditJudgment>& judgments, const align::EditSet& predicted,
                     std::size_t n_golden);

/// Selects the reference with select_reference and uses its gold set size.
SentenceCounts tally(const std::vector<EditJudgment>& judgments, const align::EditSet& predicted,
                     const corpus::CorrectionSample& sample,
                     const align::Granularity& granularity = align::Granularity::character());

/// Micro-averaged P = sum CE / (sum CE + sum WE), R = sum CE / sum N_golden,
/// with the same zero-denominator conventions as exact-match scoring.
SeeReport score_see(std::vector<metrics::SentenceScore<SentenceCounts>> sentences, double beta = 0.5);

/// Everything a judge sees for one sentence.
struct JudgeInput {
  const corpus::CorrectionSample& sample;
  const std::string& hypothesis;
  const align::EditSet& predicted;
  std::optional<std::size_t> reference_index;
  const std::string& gold_reference;  // the source itself when there is no reference
  const align::EditSet& gold;
  const exam::ExplanationRecord* explanation;
};

using JudgeFn = std::function<std::vector<EditJudgment>(const JudgeInput&)>;

struct SeeConfig {
  align::Granularity granularity = align::Granularity::character();
  JudgeOptions judge;
  std::optional<std::string> evaluated_model;
  bool allow_same_model = false;
  bool use_explanations = false;
  std::size_t workers = 1;
  double beta = 0.5;
};

struct SeeExclusion {
  std::string sample_id;
  std::string reason;
  std::vector<std::string> raw_responses;
  bool backend_failure = false;
};

struct SeeResult {
  SeeReport report;
  std::vector<EditJudgment> judgments;  // prediction order, then edit index
  std::vector<SeeExclusion> excluded;
  nlohmann::ordered_json fingerprint;
};

/// Judges every prediction with `judge`. JudgmentFailed sentences are
/// excluded from the aggregate and listed. Unknown ids raise MissingSampleError.
SeeResult evaluate(const std::vector<corpus::CorrectionSample>& samples,
                   const std::vector<corpus::Prediction>& predictions,
                   const std::vector<exam::ExplanationRecord>& explanations, const JudgeFn& judge,
                   const SeeConfig& config);

/// evaluate() with the LLM judge. Throws ConfigError when the judge model
/// equals the evaluated model and allow_same_model is not set.
SeeResult run_see(const std::vector<corpus::CorrectionSample>& samples,
                  const std::vector<corpus::Prediction>& predictions,
                  const std::vector<exam::ExplanationRecord>& explanations, llm::LlmClient& client,
                  const llm::PromptLibrary& prompts, const SeeConfig& config);

nlohmann::ordered_json report_json(const SeeResult& result);

/// Writes judgments.jsonl and see_report.json into `out_dir`.
void write_see_outputs(const SeeResult& result, const std::filesystem::path& out_dir);

}  // namespace gecforge::see
