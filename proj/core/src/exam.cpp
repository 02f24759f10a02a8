#include "gecforge/exam.hpp"

#include <set>

#include "gecforge/errors.hpp"
#include "gecforge/parallel.hpp"
#include "gecforge/text.hpp"

namespace gecforge::exam {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Schema ------------------------------------------------------------------------------

ErrorTypeSchema ErrorTypeSchema::from_json(const json& j) {
  const json* list = &j;
  if (j.is_object()) {
    const auto it = j.find("types");
    if (it == j.end()) throw ConfigError("error-type schema has no \"types\" list");
    list = &*it;
  }
  if (!list->is_array() || list->empty()) throw ConfigError("error-type schema must list at least one type");
  ErrorTypeSchema s;
  s.types.clear();
  std::set<std::string> seen;
  for (const auto& t : *list) {
    if (!t.is_string()) throw ConfigError("error-type names must be strings");
    std::string name = normalize_text(t.get<std::string>());
    if (name.empty()) throw ConfigError("empty error-type name");
    if (!seen.insert(name).second) throw ConfigError("duplicate error type '" + name + "'");
    s.types.push_back(std::move(name));
  }
  return s;
}

ErrorTypeSchema ErrorTypeSchema::load(const std::filesystem::path& path) {
  const auto j = json::parse(corpus::read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("schema file " + path.string() + " is not valid JSON");
  return from_json(j);
}

std::string ErrorTypeSchema::render() const {
  std::string out;
  for (const auto& t : types) {
    if (!out.empty()) out += "; ";
    out += t;
  }
  return out;
}

// Records -----------------------------------------------------------------------------

ordered_json to_json(const ExplanationRecord& r) {
  ordered_json j;
  j["id"] = r.sample_id;
  j["error_types"] = r.error_types;
  j["reference"] = r.reference;
  j["explanations"] = ordered_json::array();
  for (const auto& e : r.explanations) j["explanations"].push_back({{"rank", e.rank}, {"text", e.text}});
  return j;
}

ExplanationRecord record_from_json(const json& j) {
  ExplanationRecord r;
  r.sample_id = j.at("id").get<std::string>();
  r.error_types = j.at("error_types").get<std::vector<std::string>>();
  r.reference = j.at("reference").get<std::string>();
  for (const auto& e : j.at("explanations")) r.explanations.push_back({e.at("rank").get<int>(), e.at("text").get<std::string>()});
  return r;
}

std::vector<ExplanationRecord> load_records(const std::filesystem::path& path) {
  const std::string content = corpus::read_file(path);
  std::vector<ExplanationRecord> out;
  std::set<std::string> ids;
  std::size_t lineno = 0;
  for (std::string_view line : corpus::split_lines(content)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(lineno, std::string(line), std::string("bad explanation record: ") + e.what());
    }
    if (!ids.insert(out.back().sample_id).second) throw DuplicateIdError(out.back().sample_id);
  }
  return out;
}

// Modes -------------------------------------------------------------------------------

GoldMode parse_gold_mode(std::string_view s) {
  if (s == "none") return GoldMode::None;
  if (s == "train") return GoldMode::Train;
  if (s == "test") return GoldMode::Test;
  if (s == "both") return GoldMode::Both;
  throw ConfigError("unknown gold mode '" + std::string(s) + "' (expected none|train|test|both)");
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw ConfigError("unknown split '" + std::string(s) + "' (expected train|test)");
}

std::string_view to_string(GoldMode m) {
  switch (m) {
    case GoldMode::None:
      return "none";
    case GoldMode::Train:
      return "train";
    case GoldMode::Test:
      return "test";
    case GoldMode::Both:
      return "both";
  }
  return "?";
}

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

bool gold_in_prompt(GoldMode mode, Split split) {
  switch (mode) {
    case GoldMode::None:
      return false;
    case GoldMode::Both:
      return true;
    case GoldMode::Train:
    case GoldMode::Test:
      if ((mode == GoldMode::Train) != (split == Split::Train)) {
        throw ConfigError("gold mode '" + std::string(to_string(mode)) + "' does not apply to a " +
                          std::string(to_string(split)) + " split");
      }
      return true;
  }
  return false;
}

// Annotation --------------------------------------------------------------------------

llm::LlmRequest build_explain_request(const corpus::CorrectionSample& sample, const AnnotateOptions& options,
                                      const llm::PromptLibrary& prompts) {
  llm::Slots slots{{"sentence", sample.source}, {"error_types", options.schema.render()}};
  if (options.include_gold) {
    std::string gold;
    for (const auto& r : sample.references) {
      if (!gold.empty()) gold += "\n";
      gold += r;
    }
    slots["gold"] = gold;
  }
  llm::LlmRequest req;
  req.model = options.model;
  req.system_prompt = prompts.system_prompt("explain");
  req.user_prompt = prompts.render("explain", slots);
  req.demonstrations = prompts.demonstrations("explain");
  req.temperature = options.temperature;
  req.seed = options.seed;
  return req;
}

namespace {

llm::LlmResponse call(llm::LlmClient& client, const llm::LlmRequest& req, const std::string& id,
                      const std::vector<std::string>& raws) {
  try {
    return client.complete(req);
  } catch (const Error& e) {
    if (e.category() != Error::Category::Backend) throw;
    throw AnnotationFailed(id, e.what(), raws, true);
  }
}

ExplanationRecord to_record(const std::string& id, llm::ExplanationPayload p) {
  return {id, std::move(p.error_types), std::move(p.reference), std::move(p.explanations)};
}

}  // namespace

ExplanationRecord annotate_sample(const corpus::CorrectionSample& sample, llm::LlmClient& client,
                                  const llm::PromptLibrary& prompts, const AnnotateOptions& options) {
  const llm::SchemaContext ctx{options.schema.types, std::nullopt};
  const llm::LlmRequest req = build_explain_request(sample, options, prompts);
  std::vector<std::string> raws;

  const llm::LlmResponse first = call(client, req, sample.id, raws);
  raws.push_back(first.text);
  std::string problem;
  try {
    return to_record(sample.id, llm::parse_explanation(first.text, ctx));
  } catch (const ParseError& e) {
    problem = e.what();
  } catch (const SchemaError& e) {
    problem = e.what();
  }

  llm::LlmRequest repair = req;
  repair.user_prompt = prompts.render("repair", {{"problem", problem}, {"original", req.user_prompt}, {"previous", first.text}});
  const llm::LlmResponse second = call(client, repair, sample.id, raws);
  raws.push_back(second.text);
  try {
    return to_record(sample.id, llm::parse_explanation(second.text, ctx));
  } catch (const ParseError& e) {
    throw AnnotationFailed(sample.id, std::string("after repair: ") + e.what(), raws);
  } catch (const SchemaError& e) {
    throw AnnotationFailed(sample.id, std::string("after repair: ") + e.what(), raws);
  }
}

// Augmented inputs --------------------------------------------------------------------

namespace {

constexpr std::string_view kTypes = "[TYPES] ";
constexpr std::string_view kRef = "[REF]";
constexpr std::string_view kExpl = "[EXPL]";
constexpr std::string_view kSrc = "[SRC]";

void append_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    if (c == '\\' || c == '[' || c == ';' || c == '|') out += '\\';
    out += c;
  }
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      if (++i == s.size()) throw EncodingError("dangling escape in augmented input");
    }
    out += s[i];
  }
  return out;
}

// Position of the first unescaped '[' at or after `from`, which must open
// ` <marker> `. Returns the index of the space before it.
std::size_t find_marker(std::string_view text, std::size_t from, std::string_view marker) {
  for (std::size_t i = from; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
      continue;
    }
    if (text[i] != '[') continue;
    if (i == from || text[i - 1] != ' ' || text.substr(i, marker.size()) != marker ||
        text.substr(i + marker.size(), 1) != " ") {
      throw EncodingError("expected " + std::string(marker) + " in augmented input");
    }
    return i - 1;
  }
  throw EncodingError("missing " + std::string(marker) + " in augmented input");
}

// Splits on unescaped `sep`, keeping escapes in the pieces.
std::vector<std::string_view> split_unescaped(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
    } else if (s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

}  // namespace

std::string serialize_augmented(const ExplanationRecord* record, std::string_view source) {
  std::string out;
  if (record) {
    out += kTypes;
    for (std::size_t i = 0; i < record->error_types.size(); ++i) {
      if (i > 0) out += ';';
      append_escaped(out, record->error_types[i]);
    }
    out += ' ';
    out += kRef;
    out += ' ';
    append_escaped(out, record->reference);
    out += ' ';
    out += kExpl;
    out += ' ';
    for (std::size_t i = 0; i < record->explanations.size(); ++i) {
      if (i > 0) out += " | ";
      append_escaped(out, record->explanations[i].text);
    }
    out += ' ';
  }
  out += kSrc;
  out += ' ';
  out += source;
  return out;
}

ParsedAugmented parse_augmented(std::string_view text) {
  ParsedAugmented p;
  if (text.starts_with("[SRC] ")) {
    p.source = std::string(text.substr(6));
    return p;
  }
  if (!text.starts_with(kTypes)) throw EncodingError("augmented input starts with neither [TYPES] nor [SRC]");
  p.augmented = true;
  std::size_t pos = kTypes.size();

  const std::size_t ref = find_marker(text, pos, kRef);
  for (auto piece : split_unescaped(text.substr(pos, ref - pos), ';')) p.error_types.push_back(unescape(piece));
  pos = ref + kRef.size() + 2;

  const std::size_t expl = find_marker(text, pos, kExpl);
  p.reference = unescape(text.substr(pos, expl - pos));
  pos = expl + kExpl.size() + 2;

  const std::size_t src = find_marker(text, pos, kSrc);
  const auto pieces = split_unescaped(text.substr(pos, src - pos), '|');
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::string_view piece = pieces[i];
    // Separators are " | ": strip the spaces that belong to them.
    if (i > 0) {
      if (!piece.starts_with(' ')) throw EncodingError("malformed explanation separator");
      piece.remove_prefix(1);
    }
    if (i + 1 < pieces.size()) {
      if (!piece.ends_with(' ')) throw EncodingError("malformed explanation separator");
      piece.remove_suffix(1);
    }
    p.explanations.push_back(unescape(piece));
  }
  p.source = std::string(text.substr(src + kSrc.size() + 2));
  return p;
}

AugmentedSample augment(const corpus::CorrectionSample& sample, const ExplanationRecord* record, Split split) {
  AugmentedSample a;
  a.sample_id = sample.id;
  a.augmented = record != nullptr;
  a.augmented_input = serialize_augmented(record, sample.source);
  if (split == Split::Train) {
    if (sample.references.empty()) throw FormatError("train sample " + sample.id + " has no reference to use as target");
    a.target = sample.references.front();
  }

  if (a.augmented_input.find_first_of("\t\r\n") != std::string::npos) {
    throw EncodingError("augmented input for " + sample.id + " contains a tab or line break");
  }
  const ParsedAugmented back = parse_augmented(a.augmented_input);
  bool same = back.augmented == a.augmented && back.source == sample.source;
  if (same && record) {
    std::vector<std::string> expl;
    for (const auto& e : record->explanations) expl.push_back(e.text);
    same = back.error_types == record->error_types && back.reference == record->reference && back.explanations == expl;
  }
  if (!same) throw EncodingError("augmented input for " + sample.id + " does not parse back to its fields");
  return a;
}

std::string format_augmented(const std::vector<AugmentedSample>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.sample_id;
    out += '\t';
    out += r.augmented_input;
    if (r.target) {
      out += '\t';
      out += *r.target;
    }
    out += r.augmented ? "\ttrue\n" : "\tfalse\n";
  }
  return out;
}

void emit_augmented(const std::vector<corpus::CorrectionSample>& samples,
                    const std::vector<std::optional<ExplanationRecord>>& records, const std::filesystem::path& path,
                    Split split) {
  if (records.size() != samples.size()) throw InvariantError("one record slot per sample is required");
  std::vector<AugmentedSample> rows;
  rows.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rows.push_back(augment(samples[i], records[i] ? &*records[i] : nullptr, split));
  }
  corpus::write_file_atomic(path, format_augmented(rows));
}

// Pipeline ----------------------------------------------------------------------------

ExamResult run_exam(const std::vector<corpus::CorrectionSample>& samples, llm::LlmClient& client,
                    const llm::PromptLibrary& prompts, const ExamConfig& config) {
  if (config.n_candidates != 1) throw ConfigError("only one candidate explanation per sentence is supported");
  if (config.annotate.schema.types.empty()) throw ConfigError("error-type schema is empty");
  AnnotateOptions options = config.annotate;
  options.include_gold = gold_in_prompt(config.gold_mode, config.split);

  std::vector<std::optional<ExplanationRecord>> records(samples.size());
  std::vector<std::optional<ExamFailure>> failed(samples.size());
  parallel_for(samples.size(), config.workers, [&](std::size_t i) {
    try {
      records[i] = annotate_sample(samples[i], client, prompts, options);
    } catch (const AnnotationFailed& e) {
      failed[i] = ExamFailure{e.sample_id(), e.reason(), e.raw_responses(), e.backend_failure()};
    }
  });

  ExamResult result;
  result.records = std::move(records);
  for (auto& f : failed) {
    if (f) result.failures.push_back(std::move(*f));
  }
  return result;
}

ordered_json failure_report(const ExamResult& result, std::size_t corpus_size) {
  ordered_json j;
  j["total"] = corpus_size;
  j["annotated"] = corpus_size - result.failures.size();
  j["failed"] = ordered_json::array();
  for (const auto& f : result.failures) {
    ordered_json row;
    row["id"] = f.sample_id;
    row["reason"] = f.reason;
    row["backend_failure"] = f.backend_failure;
    row["raw_responses"] = f.raw_responses;
    j["failed"].push_back(std::move(row));
  }
  return j;
}

void write_exam_outputs(const std::vector<corpus::CorrectionSample>& samples, const ExamResult& result,
                        const std::filesystem::path& out_dir, Split split) {
  std::string records;
  for (const auto& r : result.records) {
    if (r) records += to_json(*r).dump() + "\n";
  }
  corpus::write_file_atomic(out_dir / "records.jsonl", records);
  emit_augmented(samples, result.records, out_dir / "augmented.tsv", split);
  corpus::write_file_atomic(out_dir / "failures.json", failure_report(result, samples.size()).dump(2) + "\n");
}

}  // namespace gecforge::exam
