#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gecforge/corpus.hpp"
#include "gecforge/llm/client.hpp"
#include "gecforge/llm/prompt.hpp"
#include "gecforge/llm/structured.hpp"

namespace gecforge::exam {

/// Error types the explainer may choose from, in prompt order.
struct ErrorTypeSchema {
  std::vector<std::string> types = llm::default_error_types();

  /// `{"types": [...]}` or a bare array. Names are normalized; empty lists,
  /// empty names and duplicates are ConfigErrors.
  static ErrorTypeSchema from_json(const nlohmann::json& j);
  static ErrorTypeSchema load(const std::filesystem::path& path);

  /// "t1; t2; ..." as injected into the explain prompt.
  std::string render() const;
};

struct ExplanationRecord {
  std::string sample_id;
  std::vector<std::string> error_types;
  std::string reference;
  std::vector<llm::RankedExplanation> explanations;  // rank 1 first

  friend bool operator==(const ExplanationRecord&, const ExplanationRecord&) = default;
};

nlohmann::ordered_json to_json(const ExplanationRecord& record);
ExplanationRecord record_from_json(const nlohmann::json& j);
/// records.jsonl reader, keyed by sample id.
std::vector<ExplanationRecord> load_records(const std::filesystem::path& path);

enum class GoldMode { None, Train, Test, Both };
enum class Split { Train, Test };

GoldMode parse_gold_mode(std::string_view s);
Split parse_split(std::string_view s);
std::string_view to_string(GoldMode m);
std::string_view to_string(Split s);

/// Whether gold references go into the explain prompt for `split`. A mode
/// naming only the other split is a ConfigError.
bool gold_in_prompt(GoldMode mode, Split split);

struct AnnotateOptions {
  std::string model = "gpt-3.5-turbo";
  ErrorTypeSchema schema;
  bool include_gold = false;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

llm::LlmRequest build_explain_request(const corpus::CorrectionSample& sample, const AnnotateOptions& options,
                                      const llm::PromptLibrary& prompts);

/// One request, then at most one repair request when the reply does not parse
/// or violates the schema. Throws AnnotationFailed with every raw reply when
/// both fail, or with backend_failure set when the backend errors out.
ExplanationRecord annotate_sample(const corpus::CorrectionSample& sample, llm::LlmClient& client,
                                  const llm::PromptLibrary& prompts, const AnnotateOptions& options);

// Augmented inputs ----------------------------------------------------------------------

/// `[TYPES] t1;t2 [REF] ref [EXPL] e1 | e2 [SRC] source`, or `[SRC] source`
/// without a record. Inside the explanation block `\`, `[`, `;` and `|` are
/// backslash-escaped; the source is copied verbatim.
std::string serialize_augmented(const ExplanationRecord* record, std::string_view source);

struct ParsedAugmented {
  bool augmented = false;
  std::vector<std::string> error_types;
  std::string reference;
  std::vector<std::string> explanations;
  std::string source;
};

/// Inverse of serialize_augmented. Throws EncodingError on malformed input.
ParsedAugmented parse_augmented(std::string_view text);

struct AugmentedSample {
  std::string sample_id;
  std::string augmented_input;
  std::optional<std::string> target;  // train split only
  bool augmented = false;
};

/// Throws EncodingError when the line would not parse back to the same
/// fields, and FormatError when a train sample has no reference.
AugmentedSample augment(const corpus::CorrectionSample& sample, const ExplanationRecord* record, Split split);

/// TSV rows: id, augmented_input, [target], true|false.
std::string format_augmented(const std::vector<AugmentedSample>& rows);

/// `records[i]` belongs to `samples[i]`; nullopt marks a failed sample.
void emit_augmented(const std::vector<corpus::CorrectionSample>& samples,
                    const std::vector<std::optional<ExplanationRecord>>& records,
                    const std::filesystem::path& path, Split split);

// Pipeline ------------------------------------------------------------------------------

struct ExamConfig {
  AnnotateOptions annotate;  // include_gold is derived from gold_mode and split
  GoldMode gold_mode = GoldMode::None;
  Split split = Split::Test;
  std::size_t workers = 1;
  std::size_t n_candidates = 1;
};

struct ExamFailure {
  std::string sample_id;
  std::string reason;
  std::vector<std::string> raw_responses;
  bool backend_failure = false;
};

struct ExamResult {
  std::vector<std::optional<ExplanationRecord>> records;  // corpus order
  std::vector<ExamFailure> failures;                      // corpus order
};

/// Annotates every sample. Per-sample failures are collected, never thrown;
/// configuration errors abort the run.
ExamResult run_exam(const std::vector<corpus::CorrectionSample>& samples, llm::LlmClient& client,
                    const llm::PromptLibrary& prompts, const ExamConfig& config);

nlohmann::ordered_json failure_report(const ExamResult& result, std::size_t corpus_size);

/// Writes records.jsonl, augmented.tsv and failures.json into `out_dir`.
void write_exam_outputs(const std::vector<corpus::CorrectionSample>& samples, const ExamResult& result,
                        const std::filesystem::path& out_dir, Split split);

}  // namespace gecforge::exam
