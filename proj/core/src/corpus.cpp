#include "gecforge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>
#include <thread>
#include <unistd.h>

#include "gecforge/errors.hpp"
#include "gecforge/text.hpp"

namespace gecforge::corpus {

using align::EditSet;
using align::Granularity;
using align::Tokens;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kNone = "-NONE-";
constexpr std::string_view kFieldSep = "|||";

std::vector<std::string_view> split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

std::string normalize_field(std::string_view raw, std::size_t line) {
  try {
    return normalize_text(raw);
  } catch (const DecodeError& e) {
    throw ParseError(line, "", "invalid UTF-8 at byte offset " + std::to_string(e.byte_offset()));
  }
}

std::string sequential_id(std::size_t line) { return "s" + std::to_string(line); }

void check_unique_ids(const std::vector<CorrectionSample>& samples) {
  std::set<std::string_view> seen;
  for (const auto& s : samples) {
    if (!seen.insert(s.id).second) throw DuplicateIdError(s.id);
  }
}

// Checks that stored gold edits turn the source into each reference.
void check_gold_consistency(const CorrectionSample& sample, std::size_t line) {
  if (!sample.gold_edits) return;
  for (std::size_t r = 0; r < sample.references.size(); ++r) {
    const EditSet& set = (*sample.gold_edits)[r];
    const Tokens src = align::tokenize(sample.source, set.granularity);
    Tokens applied;
    try {
      applied = align::apply_edits(src, set);
    } catch (const Error& e) {
      throw ParseError(line, sample.id, std::string("gold edits invalid: ") + e.what());
    }
    if (applied != align::tokenize(sample.references[r], set.granularity)) {
      throw ParseError(line, sample.id,
                       "gold edits of reference " + std::to_string(r) + " do not yield the reference");
    }
  }
}

// ParallelTSV -------------------------------------------------------------------

std::vector<CorrectionSample> parse_tsv(std::string_view content) {
  std::vector<CorrectionSample> samples;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = lines[i];
    if (std::all_of(line.begin(), line.end(), is_ascii_space)) continue;
    const auto fields = split(line, "\t");
    if (fields.size() < 2) throw ParseError(lineno, std::string(line), "expected id<TAB>source[<TAB>ref...]");
    CorrectionSample s;
    s.id = normalize_field(fields[0], lineno);
    if (s.id.empty()) s.id = sequential_id(lineno);
    s.source = normalize_field(fields[1], lineno);
    if (s.source.empty()) throw ParseError(lineno, std::string(line), "empty source");
    for (std::size_t f = 2; f < fields.size(); ++f) {
      std::string ref = normalize_field(fields[f], lineno);
      if (ref.empty()) throw ParseError(lineno, std::string(line), "empty reference in column " + std::to_string(f + 1));
      s.references.push_back(std::move(ref));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void check_tsv_field(std::string_view field, const std::string& id) {
  if (field.find_first_of("\t\n\r") != std::string_view::npos) {
    throw FormatError("sample " + id + " contains a tab or line break, which ParallelTSV cannot represent");
  }
}

std::string format_tsv(const std::vector<CorrectionSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    check_tsv_field(s.id, s.id);
    check_tsv_field(s.source, s.id);
    out += s.id;
    out += '\t';
    out += s.source;
    for (const auto& r : s.references) {
      check_tsv_field(r, s.id);
      out += '\t';
      out += r;
    }
    out += '\n';
  }
  return out;
}

// M2 ------------------------------------------------------------------------------

std::string escape_m2_token(std::string_view token, bool escape) {
  if (!escape) return std::string(token);
  std::string out;
  for (char c : token) {
    if (c == ' ') {
      out += "\\s";
    } else if (c == '\\') {
      out += "\\\\";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string unescape_m2_token(std::string_view token, bool escape, std::size_t line) {
  if (!escape) return std::string(token);
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '\\') {
      out.push_back(token[i]);
      continue;
    }
    if (i + 1 >= token.size()) throw ParseError(line, std::string(token), "dangling escape");
    const char next = token[++i];
    if (next == 's') {
      out.push_back(' ');
    } else if (next == '\\') {
      out.push_back('\\');
    } else {
      throw ParseError(line, std::string(token), "unknown escape");
    }
  }
  return out;
}

Tokens parse_m2_tokens(std::string_view field, bool escape, std::size_t line) {
  Tokens out;
  if (field.empty()) return out;
  for (std::string_view t : split(field, " ")) {
    if (t.empty()) throw ParseError(line, std::string(field), "empty token (double space)");
    out.push_back(unescape_m2_token(t, escape, line));
  }
  return out;
}

std::string join_m2_tokens(const Tokens& tokens, bool escape) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += escape_m2_token(tokens[i], escape);
  }
  return out;
}

std::size_t parse_index(std::string_view text, std::size_t line, std::string_view whole) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, std::string(whole), "bad integer '" + std::string(text) + "'");
  }
  return value;
}

struct M2Block {
  std::size_t line = 0;
  std::string id;
  Tokens source_tokens;
  std::map<std::size_t, std::vector<align::Edit>> by_annotator;
};

CorrectionSample finish_m2_block(M2Block& block, const Granularity& g) {
  CorrectionSample s;
  s.id = block.id.empty() ? sequential_id(block.line) : block.id;
  s.source = align::detokenize(block.source_tokens, g);
  if (s.source.empty()) throw ParseError(block.line, s.id, "empty source");
  const std::string normalized = normalize_field(s.source, block.line);
  if (normalized != s.source || align::tokenize(normalized, g) != block.source_tokens) {
    throw ParseError(block.line, s.source, "S line is not a normalized tokenization at granularity " + g.to_string());
  }
  std::vector<EditSet> gold;
  const std::size_t annotators = block.by_annotator.empty() ? 0 : block.by_annotator.rbegin()->first + 1;
  for (std::size_t a = 0; a < annotators; ++a) {
    EditSet set{{}, block.source_tokens.size(), g};
    if (const auto it = block.by_annotator.find(a); it != block.by_annotator.end()) {
      set.edits = std::move(it->second);
      std::stable_sort(set.edits.begin(), set.edits.end(), [](const auto& x, const auto& y) {
        return std::pair(x.start, x.end) < std::pair(y.start, y.end);
      });
    }
    Tokens target;
    try {
      target = align::apply_edits(block.source_tokens, set);
    } catch (const Error& e) {
      throw ParseError(block.line, s.id, "annotator " + std::to_string(a) + ": " + e.what());
    }
    std::string reference = align::detokenize(target, g);
    if (reference.empty() || normalize_field(reference, block.line) != reference ||
        align::tokenize(reference, g) != target) {
      throw ParseError(block.line, s.id, "annotator " + std::to_string(a) + " yields an empty or non-normalized reference");
    }
    s.references.push_back(std::move(reference));
    gold.push_back(std::move(set));
  }
  s.gold_edits = std::move(gold);
  return s;
}

std::vector<CorrectionSample> parse_m2(std::string_view content) {
  std::vector<CorrectionSample> samples;
  Granularity g = Granularity::word();
  std::optional<std::string> segmenter;
  std::optional<M2Block> block;
  std::string pending_id;

  const auto flush = [&] {
    if (block) samples.push_back(finish_m2_block(*block, g));
    block.reset();
  };

  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') throw ParseError(lineno, std::string(line), "CR line ending");
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.starts_with("#")) {
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (body.starts_with("granularity=")) {
        if (!samples.empty() || block) throw ParseError(lineno, std::string(line), "granularity header after data");
        const std::string_view value = body.substr(12);
        if (value == "char") {
          g = Granularity::character();
        } else if (value == "word") {
          g = Granularity::word(segmenter.value_or(std::string(Granularity::kDefaultSegmenter)));
        } else {
          throw ParseError(lineno, std::string(line), "granularity must be char or word");
        }
      } else if (body.starts_with("segmenter=")) {
        if (!samples.empty() || block) throw ParseError(lineno, std::string(line), "segmenter header after data");
        segmenter = std::string(body.substr(10));
        if (!g.is_character()) g = Granularity::word(*segmenter);
      } else if (body.starts_with("id=")) {
        flush();
        pending_id = normalize_field(body.substr(3), lineno);
        if (pending_id.empty()) throw ParseError(lineno, std::string(line), "empty id");
      }
      continue;
    }
    if (line.starts_with("S ") || line == "S") {
      flush();
      block.emplace();
      block->line = lineno;
      block->id = std::exchange(pending_id, {});
      try {
        block->source_tokens = parse_m2_tokens(line.size() > 2 ? line.substr(2) : "", g.is_character(), lineno);
      } catch (const DecodeError& e) {
        throw ParseError(lineno, "", "invalid UTF-8");
      }
      continue;
    }
    if (line.starts_with("A ")) {
      if (!block) throw ParseError(lineno, std::string(line), "A line outside a block");
      const auto fields = split(line.substr(2), kFieldSep);
      if (fields.size() != 6) throw ParseError(lineno, std::string(line), "A line needs 6 |||-separated fields");
      const auto span = split(fields[0], " ");
      if (span.size() != 2) throw ParseError(lineno, std::string(line), "bad span");
      const std::size_t annotator = parse_index(fields[5], lineno, line);
      if (annotator > 4096) throw ParseError(lineno, std::string(line), "annotator id out of range");
      auto& edits = block->by_annotator[annotator];
      if (span[0] == "-1" && span[1] == "-1") {
        if (fields[1] != "noop") throw ParseError(lineno, std::string(line), "-1 -1 span requires type noop");
        continue;
      }
      align::Edit e;
      e.start = parse_index(span[0], lineno, line);
      e.end = parse_index(span[1], lineno, line);
      if (fields[2] != kNone) e.replacement = parse_m2_tokens(fields[2], g.is_character(), lineno);
      if (e.start == e.end && e.replacement.empty()) throw ParseError(lineno, std::string(line), "null edit");
      edits.push_back(std::move(e));
      continue;
    }
    throw ParseError(lineno, std::string(line), "expected S, A, # or blank line");
  }
  flush();
  return samples;
}

std::string format_m2(const std::vector<CorrectionSample>& samples, const WriteOptions& options) {
  std::optional<Granularity> g = options.m2_granularity;
  if (!g) {
    for (const auto& s : samples) {
      if (s.gold_edits && !s.gold_edits->empty()) {
        g = s.gold_edits->front().granularity;
        break;
      }
    }
  }
  const Granularity granularity = g.value_or(Granularity::character());
  std::string out = m2_header(granularity);
  for (const auto& s : samples) {
    if (s.id.find_first_of("\n\r") != std::string::npos) throw FormatError("sample id contains a line break");
    const Tokens src = align::tokenize(s.source, granularity);
    out += "# id=" + s.id + "\n";
    out += m2_source_line(src, granularity) + "\n";
    if (s.gold_edits) {
      for (const auto& set : *s.gold_edits) {
        if (set.granularity != granularity) {
          throw FormatError("sample " + s.id + " has gold edits at " + set.granularity.to_string() +
                            " but the M2 file is " + granularity.to_string());
        }
      }
      try {
        check_gold_consistency(s, 0);
      } catch (const ParseError& e) {
        throw FormatError(e.what());
      }
    }
    const std::vector<EditSet> gold = gold_edit_sets(s, granularity);
    for (std::size_t a = 0; a < gold.size(); ++a) {
      for (const auto& e : gold[a].edits) {
        if (e.replacement.size() == 1 && e.replacement.front() == kNone) {
          throw FormatError("replacement token -NONE- is reserved in M2");
        }
      }
      for (const auto& l : m2_edit_lines(gold[a], a)) out += l + "\n";
    }
    out += "\n";
  }
  return out;
}

// JsonLines -----------------------------------------------------------------------

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(line, obj.dump(), std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::vector<CorrectionSample> parse_jsonl(std::string_view content) {
  std::vector<CorrectionSample> samples;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = lines[i];
    if (std::all_of(line.begin(), line.end(), is_ascii_space)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(lineno, std::string(line), e.what());
    }
    if (!obj.is_object()) throw ParseError(lineno, std::string(line), "expected a JSON object");
    CorrectionSample s;
    if (obj.contains("id")) {
      s.id = normalize_field(require_string(obj, "id", lineno), lineno);
      if (s.id.empty()) throw ParseError(lineno, std::string(line), "empty id");
    } else {
      s.id = sequential_id(lineno);
    }
    s.source = normalize_field(require_string(obj, "source", lineno), lineno);
    if (s.source.empty()) throw ParseError(lineno, std::string(line), "empty source");
    const auto refs = obj.find("references");
    if (refs == obj.end() || !refs->is_array()) throw ParseError(lineno, std::string(line), "missing array 'references'");
    for (const auto& r : *refs) {
      if (!r.is_string()) throw ParseError(lineno, std::string(line), "non-string reference");
      std::string ref = normalize_field(r.get<std::string>(), lineno);
      if (ref.empty()) throw ParseError(lineno, std::string(line), "empty reference");
      s.references.push_back(std::move(ref));
    }
    if (const auto ge = obj.find("gold_edits"); ge != obj.end() && !ge->is_null()) {
      if (!ge->is_array() || ge->size() != s.references.size()) {
        throw ParseError(lineno, std::string(line), "gold_edits must list one edit set per reference");
      }
      std::vector<EditSet> gold;
      for (const auto& set : *ge) {
        try {
          gold.push_back(edit_set_from_json(set));
        } catch (const Error& e) {
          throw ParseError(lineno, std::string(line), e.what());
        }
      }
      s.gold_edits = std::move(gold);
      check_gold_consistency(s, lineno);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string format_jsonl(const std::vector<CorrectionSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += sample_to_json(s).dump();
    out += '\n';
  }
  return out;
}

}  // namespace

// -----------------------------------------------------------------------------------

CorpusFormat parse_format(std::string_view name) {
  if (name == "tsv") return CorpusFormat::ParallelTSV;
  if (name == "m2") return CorpusFormat::M2;
  if (name == "jsonl") return CorpusFormat::JsonLines;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected tsv|m2|jsonl)");
}

std::string_view to_string(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::ParallelTSV:
      return "tsv";
    case CorpusFormat::M2:
      return "m2";
    case CorpusFormat::JsonLines:
      return "jsonl";
  }
  return "?";
}

CorpusFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".tsv") return CorpusFormat::ParallelTSV;
  if (ext == ".m2") return CorpusFormat::M2;
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::JsonLines;
  throw ConfigError("cannot infer corpus format from '" + path.string() + "'; pass it explicitly");
}

void validate_sample(const CorrectionSample& s) {
  if (s.id.empty()) throw InvariantError("sample id is empty");
  if (s.source.empty()) throw InvariantError("sample " + s.id + " has an empty source");
  if (s.gold_edits && s.gold_edits->size() != s.references.size()) {
    throw InvariantError("sample " + s.id + ": gold_edits length differs from references length");
  }
}

std::vector<CorrectionSample> parse_corpus(std::string_view content, CorpusFormat format) {
  std::vector<CorrectionSample> samples;
  switch (format) {
    case CorpusFormat::ParallelTSV:
      samples = parse_tsv(content);
      break;
    case CorpusFormat::M2:
      samples = parse_m2(content);
      break;
    case CorpusFormat::JsonLines:
      samples = parse_jsonl(content);
      break;
  }
  check_unique_ids(samples);
  return samples;
}

std::vector<CorrectionSample> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  return parse_corpus(read_file(path), format);
}

std::string format_corpus(const std::vector<CorrectionSample>& samples, CorpusFormat format,
                          const WriteOptions& options) {
  for (const auto& s : samples) validate_sample(s);
  check_unique_ids(samples);
  switch (format) {
    case CorpusFormat::ParallelTSV:
      return format_tsv(samples);
    case CorpusFormat::M2:
      return format_m2(samples, options);
    case CorpusFormat::JsonLines:
      return format_jsonl(samples);
  }
  return {};
}

void write_corpus(const std::vector<CorrectionSample>& samples, const std::filesystem::path& path,
                  CorpusFormat format, const WriteOptions& options) {
  write_file_atomic(path, format_corpus(samples, format, options));
}

std::vector<EditSet> gold_edit_sets(const CorrectionSample& sample, const Granularity& granularity) {
  if (sample.gold_edits) {
    const auto& stored = *sample.gold_edits;
    const bool match = std::all_of(stored.begin(), stored.end(),
                                   [&](const EditSet& e) { return e.granularity == granularity; });
    if (match && stored.size() == sample.references.size()) return stored;
  }
  const Tokens src = align::tokenize(sample.source, granularity);
  std::vector<EditSet> out;
  out.reserve(sample.references.size());
  for (const auto& ref : sample.references) {
    out.push_back(align::extract_edits(src, align::tokenize(ref, granularity), granularity));
  }
  return out;
}

// Predictions -----------------------------------------------------------------------

std::vector<Prediction> parse_predictions(std::string_view content, std::string_view layout,
                                          const std::vector<CorrectionSample>& corpus) {
  std::vector<Prediction> out;
  const auto lines = split_lines(content);
  if (layout == "jsonl" || layout == "tsv") {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::size_t lineno = i + 1;
      const std::string_view line = lines[i];
      if (std::all_of(line.begin(), line.end(), is_ascii_space)) continue;
      Prediction p;
      if (layout == "tsv") {
        const auto fields = split(line, "\t");
        if (fields.size() != 2) throw ParseError(lineno, std::string(line), "expected id<TAB>hypothesis");
        p.sample_id = normalize_field(fields[0], lineno);
        p.hypothesis = normalize_field(fields[1], lineno);
      } else {
        json obj;
        try {
          obj = json::parse(line);
        } catch (const json::exception& e) {
          throw ParseError(lineno, std::string(line), e.what());
        }
        if (!obj.is_object()) throw ParseError(lineno, std::string(line), "expected a JSON object");
        p.sample_id = normalize_field(require_string(obj, "id", lineno), lineno);
        p.hypothesis = normalize_field(require_string(obj, "hypothesis", lineno), lineno);
      }
      if (p.sample_id.empty()) throw ParseError(lineno, std::string(line), "empty prediction id");
      out.push_back(std::move(p));
    }
    return out;
  }
  if (lines.size() != corpus.size()) {
    throw ParseError(lines.size(), "",
                     "hypothesis file has " + std::to_string(lines.size()) + " lines but the corpus has " +
                         std::to_string(corpus.size()) + " samples");
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.push_back({corpus[i].id, normalize_field(lines[i], i + 1)});
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path,
                                         const std::vector<CorrectionSample>& corpus) {
  const std::string ext = path.extension().string();
  const std::string_view layout = ext == ".jsonl" ? "jsonl" : ext == ".tsv" ? "tsv" : "lines";
  return parse_predictions(read_file(path), layout, corpus);
}

// M2 helpers --------------------------------------------------------------------------

std::string m2_header(const Granularity& g) {
  if (g.is_character()) return "# granularity=char\n";
  std::string out = "# granularity=word\n";
  if (g.segmenter() != Granularity::kDefaultSegmenter) out += "# segmenter=" + g.segmenter() + "\n";
  return out;
}

std::string m2_source_line(const Tokens& tokens, const Granularity& g) {
  return "S " + join_m2_tokens(tokens, g.is_character());
}

std::vector<std::string> m2_edit_lines(const EditSet& set, std::size_t annotator) {
  std::vector<std::string> out;
  const std::string ann = std::to_string(annotator);
  if (set.edits.empty()) {
    out.push_back("A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" + ann);
    return out;
  }
  const bool escape = set.granularity.is_character();
  for (const auto& e : set.edits) {
    std::string repl = e.replacement.empty() ? std::string(kNone) : join_m2_tokens(e.replacement, escape);
    out.push_back("A " + std::to_string(e.start) + " " + std::to_string(e.end) + "|||" +
                  std::string(align::to_string(e.kind())) + "|||" + repl + "|||REQUIRED|||-NONE-|||" + ann);
  }
  return out;
}

// JSON -----------------------------------------------------------------------------------

ordered_json edit_to_json(const align::Edit& e) {
  ordered_json j;
  j["start"] = e.start;
  j["end"] = e.end;
  j["replacement"] = e.replacement;
  j["kind"] = align::to_string(e.kind());
  return j;
}

ordered_json edit_set_to_json(const EditSet& set) {
  ordered_json j;
  j["granularity"] = set.granularity.to_string();
  j["source_len"] = set.source_len;
  j["edits"] = ordered_json::array();
  for (const auto& e : set.edits) j["edits"].push_back(edit_to_json(e));
  return j;
}

EditSet edit_set_from_json(const json& j) {
  try {
    EditSet set;
    set.granularity = Granularity::parse(j.at("granularity").get<std::string>());
    set.source_len = j.at("source_len").get<std::size_t>();
    for (const auto& ej : j.at("edits")) {
      align::Edit e;
      e.start = ej.at("start").get<std::size_t>();
      e.end = ej.at("end").get<std::size_t>();
      e.replacement = ej.at("replacement").get<Tokens>();
      if (const auto k = ej.find("kind"); k != ej.end()) {
        if (e.start <= e.end && !(e.start == e.end && e.replacement.empty()) &&
            align::parse_edit_kind(k->get<std::string>()) != e.kind()) {
          throw FormatError("edit kind '" + k->get<std::string>() + "' inconsistent with its span");
        }
      }
      set.edits.push_back(std::move(e));
    }
    align::validate_edits(std::span<const align::Edit>(set.edits), set.source_len);
    return set;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed edit set: ") + e.what());
  }
}

ordered_json sample_to_json(const CorrectionSample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["source"] = s.source;
  j["references"] = s.references;
  if (s.gold_edits) {
    j["gold_edits"] = ordered_json::array();
    for (const auto& set : *s.gold_edits) j["gold_edits"].push_back(edit_set_to_json(set));
  }
  return j;
}

// Files --------------------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(content.substr(pos));
      break;
    }
    out.push_back(content.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace gecforge::corpus
