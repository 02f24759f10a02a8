#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gecforge/llm/request.hpp"
#include "gecforge/verdict.hpp"

namespace gecforge::llm {

struct RankedExplanation {
  int rank = 0;  // 1 = most severe
  std::string text;

  friend bool operator==(const RankedExplanation&, const RankedExplanation&) = default;
};

struct ExplanationPayload {
  std::vector<std::string> error_types;
  std::string reference;
  std::vector<RankedExplanation> explanations;  // sorted by rank

  friend bool operator==(const ExplanationPayload&, const ExplanationPayload&) = default;
};

struct JudgmentItem {
  std::size_t edit_index = 0;
  EditVerdict verdict = EditVerdict::WrongEdit;
  std::string rationale;

  friend bool operator==(const JudgmentItem&, const JudgmentItem&) = default;
};

using JudgmentPayload = std::vector<JudgmentItem>;  // sorted by edit_index
using StructuredPayload = std::variant<ExplanationPayload, JudgmentPayload>;

std::vector<std::string> default_error_types();

/// What a schema is validated against.
struct SchemaContext {
  std::vector<std::string> error_types = default_error_types();
  /// When set, judgments must cover edit indices 0..edit_count-1 exactly once.
  std::optional<std::size_t> edit_count;
};

/// First balanced JSON value in `text` that parses, skipping prose and code
/// fences. Objects are always accepted; arrays only when `allow_array`.
/// Throws ResponseParseError carrying `text` when nothing parses.
nlohmann::json extract_first_json(std::string_view text, bool allow_array);

ExplanationPayload parse_explanation(std::string_view text, const SchemaContext& ctx = {});
JudgmentPayload parse_judgments(std::string_view text, const SchemaContext& ctx = {});

/// `schema` is "explanation-v1" or "judgment-v1"; anything else is a ConfigError.
StructuredPayload parse_structured(const LlmResponse& response, std::string_view schema,
                                   const SchemaContext& ctx = {});

}  // namespace gecforge::llm
