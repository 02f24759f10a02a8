#include "gecforge/align.hpp"

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <map>
#include <memory>
#include <mutex>

#include "gecforge/text.hpp"

namespace gecforge::align {

namespace detail {
std::vector<std::uint32_t>& dp_workspace() {
  thread_local std::vector<std::uint32_t> buffer;
  return buffer;
}
}  // namespace detail

Granularity Granularity::parse(std::string_view text) {
  if (text == "char" || text == "character") return character();
  if (text == "word") return word();
  if (text.starts_with("word:") && text.size() > 5) return word(std::string(text.substr(5)));
  throw ConfigError("unknown granularity '" + std::string(text) + "' (expected char|word[:segmenter])");
}

std::string Granularity::to_string() const {
  if (kind_ == Kind::Character) return "char";
  if (segmenter_ == kDefaultSegmenter) return "word";
  return "word:" + segmenter_;
}

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Insert:
      return "Insert";
    case EditKind::Delete:
      return "Delete";
    case EditKind::Substitute:
      return "Substitute";
  }
  return "?";
}

EditKind parse_edit_kind(std::string_view text) {
  if (text == "Insert") return EditKind::Insert;
  if (text == "Delete") return EditKind::Delete;
  if (text == "Substitute") return EditKind::Substitute;
  throw FormatError("unknown edit kind '" + std::string(text) + "'");
}

std::size_t operation_count(std::span<const AlignStep> script) noexcept {
  std::size_t n = 0;
  for (const auto& s : script) n += s.op != AlignOp::Match;
  return n;
}

EditSet extract_edits(const Tokens& source, const Tokens& target, const Granularity& granularity) {
  const std::span<const Token> src(source);
  const std::span<const Token> tgt(target);
  const auto script = alignment_script(src, tgt);
  return EditSet{merge_script(std::span<const AlignStep>(script), tgt), source.size(), granularity};
}

Tokens apply_edits(const Tokens& source, const EditSet& edits) {
  if (edits.source_len != source.size()) {
    throw BoundsError("edit set built for source length " + std::to_string(edits.source_len) +
                      ", applied to length " + std::to_string(source.size()));
  }
  return apply_edits(std::span<const Token>(source), std::span<const Edit>(edits.edits));
}

// ---------------------------------------------------------------------------

namespace {

Tokens split_on_space(std::string_view text) {
  Tokens out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_ascii_space(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_ascii_space(text[pos])) ++pos;
    if (pos > start) out.emplace_back(text.substr(start, pos - start));
  }
  return out;
}

std::string join_with_space(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// ICU word boundaries; the CJK dictionary splits unspaced Chinese. Whitespace
// runs are dropped.
Tokens split_icu_words(std::string_view text) {
  const icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw ConfigError(std::string("ICU word break iterator: ") + u_errorName(status));
  it->setText(u);
  Tokens out;
  for (int32_t start = it->first(), end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
    std::string piece;
    u.tempSubStringBetween(start, end).toUTF8String(piece);
    bool blank = true;
    for (char c : piece) blank = blank && is_ascii_space(c);
    if (!blank) out.push_back(std::move(piece));
  }
  return out;
}

// A space goes back only between two non-CJK letters or digits, which inverts
// split_icu_words on text whose spaces all separate such words.
std::string join_icu_words(const Tokens& tokens) {
  std::string out;
  char32_t prev_last = 0;
  for (const auto& t : tokens) {
    const std::u32string scalars = decode_utf8(t);
    if (scalars.empty()) continue;
    const auto wordish = [](char32_t c) { return u_isalnum(static_cast<UChar32>(c)) && !is_cjk_scalar(c); };
    if (prev_last != 0 && wordish(prev_last) && wordish(scalars.front())) out.push_back(' ');
    out += t;
    prev_last = scalars.back();
  }
  return out;
}

struct Registry {
  std::mutex mu;
  std::map<std::string, Segmenter, std::less<>> segmenters;

  Registry() {
    segmenters.emplace(std::string(Granularity::kDefaultSegmenter),
                       Segmenter{split_on_space, join_with_space});
    segmenters.emplace("icu", Segmenter{split_icu_words, join_icu_words});
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

Segmenter lookup(std::string_view name) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  const auto it = r.segmenters.find(name);
  if (it == r.segmenters.end()) throw ConfigError("unknown segmenter '" + std::string(name) + "'");
  return it->second;
}

}  // namespace

void register_segmenter(std::string name, Segmenter segmenter) {
  if (name.empty() || !segmenter.split || !segmenter.join) {
    throw ConfigError("segmenter registration needs a name, split and join");
  }
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  r.segmenters.insert_or_assign(std::move(name), std::move(segmenter));
}

bool has_segmenter(std::string_view name) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  return r.segmenters.find(name) != r.segmenters.end();
}

std::string join_script_aware(const Tokens& tokens) {
  std::string out;
  char32_t prev_last = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::u32string scalars = decode_utf8(tokens[i]);
    if (scalars.empty()) continue;
    if (i > 0 && prev_last != 0 && !is_cjk_scalar(prev_last) && !is_cjk_scalar(scalars.front())) {
      out.push_back(' ');
    }
    out += tokens[i];
    prev_last = scalars.back();
  }
  return out;
}

Tokens tokenize(std::string_view text, const Granularity& granularity) {
  if (granularity.is_character()) return split_scalars(text);
  return lookup(granularity.segmenter()).split(text);
}

std::string detokenize(const Tokens& tokens, const Granularity& granularity) {
  if (granularity.is_character()) {
    std::string out;
    for (const auto& t : tokens) out += t;
    return out;
  }
  return lookup(granularity.segmenter()).join(tokens);
}

}  // namespace gecforge::align
