#include "gecforge/llm/structured.hpp"

#include <algorithm>
#include <set>

#include "gecforge/errors.hpp"
#include "gecforge/text.hpp"

namespace gecforge::llm {

using json = nlohmann::json;

std::vector<std::string> default_error_types() {
  return {"punctuation errors", "spelling errors", "word errors", "syntax errors"};
}

namespace {

// End (exclusive) of the balanced value starting at `open`, or npos.
std::size_t balanced_end(std::string_view text, std::size_t open) {
  std::vector<char> stack;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '{':
        stack.push_back('}');
        break;
      case '[':
        stack.push_back(']');
        break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::string_view::npos;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default:
        break;
    }
  }
  return std::string_view::npos;
}

std::string clean_text(const json& v, const char* field, std::string_view raw) {
  if (!v.is_string()) throw SchemaError(field, v.dump(), std::string(raw));
  std::string s;
  try {
    s = normalize_text(v.get<std::string>());
  } catch (const DecodeError&) {
    throw SchemaError(field, "invalid UTF-8", std::string(raw));
  }
  if (s.empty()) throw SchemaError(field, v.dump(), std::string(raw));
  return s;
}

}  // namespace

json extract_first_json(std::string_view text, bool allow_array) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '{' && !(allow_array && c == '[')) continue;
    const std::size_t end = balanced_end(text, i);
    if (end == std::string_view::npos) continue;
    json v = json::parse(text.substr(i, end - i), nullptr, false);
    if (!v.is_discarded()) return v;
  }
  throw ResponseParseError(std::string(text));
}

ExplanationPayload parse_explanation(std::string_view text, const SchemaContext& ctx) {
  const json j = extract_first_json(text, false);
  const std::string raw(text);
  ExplanationPayload out;

  const auto types = j.find("error_types");
  if (types == j.end() || !types->is_array() || types->empty()) {
    throw SchemaError("error_types", types == j.end() ? "missing" : types->dump(), raw);
  }
  for (const auto& t : *types) {
    if (!t.is_string()) throw SchemaError("error_types", t.dump(), raw);
    const std::string name = normalize_text(t.get<std::string>());
    if (std::find(ctx.error_types.begin(), ctx.error_types.end(), name) == ctx.error_types.end() ||
        std::find(out.error_types.begin(), out.error_types.end(), name) != out.error_types.end()) {
      throw SchemaError("error_types", name, raw);
    }
    out.error_types.push_back(name);
  }

  const auto ref = j.find("reference");
  if (ref == j.end()) throw SchemaError("reference", "missing", raw);
  out.reference = clean_text(*ref, "reference", raw);

  const auto expl = j.find("explanations");
  if (expl == j.end() || !expl->is_array() || expl->empty()) {
    throw SchemaError("explanations", expl == j.end() ? "missing" : expl->dump(), raw);
  }
  std::set<int> ranks;
  for (const auto& e : *expl) {
    const auto rank = e.is_object() ? e.find("rank") : e.end();
    if (!e.is_object() || rank == e.end() || !rank->is_number_integer()) {
      throw SchemaError("rank", e.dump(), raw);
    }
    const auto r = rank->get<std::int64_t>();
    if (r < 1 || r > static_cast<std::int64_t>(expl->size()) || !ranks.insert(static_cast<int>(r)).second) {
      throw SchemaError("rank", std::to_string(r), raw);
    }
    const auto t = e.find("text");
    if (t == e.end()) throw SchemaError("text", "missing", raw);
    out.explanations.push_back({static_cast<int>(r), clean_text(*t, "text", raw)});
  }
  // n distinct ranks each in 1..n are exactly 1..n.
  std::sort(out.explanations.begin(), out.explanations.end(),
            [](const RankedExplanation& a, const RankedExplanation& b) { return a.rank < b.rank; });
  return out;
}

JudgmentPayload parse_judgments(std::string_view text, const SchemaContext& ctx) {
  json j = extract_first_json(text, true);
  const std::string raw(text);
  if (j.is_object()) {
    const auto inner = j.find("judgments");
    if (inner == j.end()) throw SchemaError("judgments", "missing", raw);
    json tmp = *inner;
    j = std::move(tmp);
  }
  if (!j.is_array()) throw SchemaError("judgments", j.dump(), raw);

  JudgmentPayload out;
  std::set<std::size_t> seen;
  for (const auto& item : j) {
    if (!item.is_object()) throw SchemaError("judgments", item.dump(), raw);
    const auto idx = item.find("edit_index");
    if (idx == item.end() || !idx->is_number_integer() || idx->get<std::int64_t>() < 0) {
      throw SchemaError("edit_index", idx == item.end() ? "missing" : idx->dump(), raw);
    }
    const auto index = static_cast<std::size_t>(idx->get<std::int64_t>());
    if ((ctx.edit_count && index >= *ctx.edit_count) || !seen.insert(index).second) {
      throw SchemaError("edit_index", std::to_string(index), raw);
    }
    const auto v = item.find("verdict");
    const auto verdict = v != item.end() && v->is_string() ? parse_verdict(v->get<std::string>()) : std::nullopt;
    if (!verdict) throw SchemaError("verdict", v == item.end() ? "missing" : v->dump(), raw);
    std::string rationale;
    if (const auto r = item.find("rationale"); r != item.end() && r->is_string()) rationale = r->get<std::string>();
    out.push_back({index, *verdict, std::move(rationale)});
  }
  if (ctx.edit_count && out.size() != *ctx.edit_count) {
    for (std::size_t i = 0; i < *ctx.edit_count; ++i) {
      if (!seen.contains(i)) throw SchemaError("edit_index", "no verdict for edit " + std::to_string(i), raw);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const JudgmentItem& a, const JudgmentItem& b) { return a.edit_index < b.edit_index; });
  return out;
}

StructuredPayload parse_structured(const LlmResponse& response, std::string_view schema, const SchemaContext& ctx) {
  if (schema == "explanation-v1") return parse_explanation(response.text, ctx);
  if (schema == "judgment-v1") return parse_judgments(response.text, ctx);
  throw ConfigError("unknown response schema '" + std::string(schema) + "'");
}

}  // namespace gecforge::llm
