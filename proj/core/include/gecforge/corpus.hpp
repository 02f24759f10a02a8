#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gecforge/align.hpp"

namespace gecforge::corpus {

/// One source sentence with its gold corrections. `gold_edits`, when present,
/// holds one EditSet per reference.
struct CorrectionSample {
  std::string id;
  std::string source;
  std::vector<std::string> references;
  std::optional<std::vector<align::EditSet>> gold_edits;

  friend bool operator==(const CorrectionSample&, const CorrectionSample&) = default;
};

struct Prediction {
  std::string sample_id;
  std::string hypothesis;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class CorpusFormat { ParallelTSV, M2, JsonLines };

/// "tsv" | "m2" | "jsonl".
CorpusFormat parse_format(std::string_view name);
std::string_view to_string(CorpusFormat format);
/// By extension: .tsv, .m2, .jsonl/.json. Throws ConfigError otherwise.
CorpusFormat format_from_path(const std::filesystem::path& path);

/// Throws InvariantError on an empty id or source, or a gold_edits/references
/// length mismatch.
void validate_sample(const CorrectionSample& sample);

std::vector<CorrectionSample> parse_corpus(std::string_view content, CorpusFormat format);
std::vector<CorrectionSample> load_corpus(const std::filesystem::path& path, CorpusFormat format);

struct WriteOptions {
  /// Token granularity recorded in an M2 header. Defaults to the gold edits'
  /// granularity, or characters when no sample carries gold edits.
  std::optional<align::Granularity> m2_granularity;
};

/// ParallelTSV does not carry gold edits; they are re-derivable from the references.
std::string format_corpus(const std::vector<CorrectionSample>& samples, CorpusFormat format,
                          const WriteOptions& options = {});
void write_corpus(const std::vector<CorrectionSample>& samples, const std::filesystem::path& path,
                  CorpusFormat format, const WriteOptions& options = {});

/// Gold edit sets at `granularity`: the stored ones when they match, otherwise
/// re-aligned from the references.
std::vector<align::EditSet> gold_edit_sets(const CorrectionSample& sample,
                                           const align::Granularity& granularity);

/// Hypotheses in one of three layouts, chosen by extension: `.jsonl`
/// ({"id","hypothesis"}), `.tsv` (id<TAB>hypothesis), anything else one
/// hypothesis per line in corpus order.
std::vector<Prediction> parse_predictions(std::string_view content, std::string_view layout,
                                          const std::vector<CorrectionSample>& corpus);
std::vector<Prediction> load_predictions(const std::filesystem::path& path,
                                         const std::vector<CorrectionSample>& corpus);

// M2 edit lines ---------------------------------------------------------------

/// "S ..." line for `tokens` at `granularity`.
std::string m2_source_line(const align::Tokens& tokens, const align::Granularity& granularity);
/// "A ..." lines for one annotator; a noop line when `edits` is empty.
std::vector<std::string> m2_edit_lines(const align::EditSet& edits, std::size_t annotator);
std::string m2_header(const align::Granularity& granularity);

// JSON forms --------------------------------------------------------------------

nlohmann::ordered_json edit_to_json(const align::Edit& edit);
nlohmann::ordered_json edit_set_to_json(const align::EditSet& edits);
/// Throws FormatError on a malformed object or a `kind` inconsistent with the span.
align::EditSet edit_set_from_json(const nlohmann::json& j);
nlohmann::ordered_json sample_to_json(const CorrectionSample& sample);

// Files ---------------------------------------------------------------------------

/// Throws IoError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::vector<std::string_view> split_lines(std::string_view content);

}  // namespace gecforge::corpus
