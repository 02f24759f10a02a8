#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gecforge/errors.hpp"

namespace gecforge::align {

using Token = std::string;
using Tokens = std::vector<Token>;

/// Unit of tokenization. Word granularity names a registered segmenter.
class Granularity {
 public:
  enum class Kind { Character, Word };

  static constexpr std::string_view kDefaultSegmenter = "whitespace-fallback";

  static Granularity character() { return Granularity(Kind::Character, ""); }
  static Granularity word(std::string segmenter = std::string(kDefaultSegmenter)) {
    return Granularity(Kind::Word, std::move(segmenter));
  }

  /// Accepts "char", "word" and "word:<segmenter>".
  static Granularity parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  const std::string& segmenter() const noexcept { return segmenter_; }
  bool is_character() const noexcept { return kind_ == Kind::Character; }

  /// Inverse of parse(); default segmenter prints as plain "word".
  std::string to_string() const;

  friend bool operator==(const Granularity&, const Granularity&) = default;

 private:
  Granularity(Kind kind, std::string segmenter) : kind_(kind), segmenter_(std::move(segmenter)) {}

  Kind kind_;
  std::string segmenter_;
};

enum class EditKind { Insert, Delete, Substitute };

std::string_view to_string(EditKind kind);
EditKind parse_edit_kind(std::string_view text);

/// Replacement of source span [start, end) by `replacement`.
template <class T>
struct BasicEdit {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<T> replacement;

  EditKind kind() const noexcept {
    if (start == end) return EditKind::Insert;
    if (replacement.empty()) return EditKind::Delete;
    return EditKind::Substitute;
  }

  friend bool operator==(const BasicEdit&, const BasicEdit&) = default;
};

using Edit = BasicEdit<Token>;

/// Edits sorted by (start, end), pairwise non-overlapping, over a source of
/// `source_len` tokens at `granularity`.
struct EditSet {
  std::vector<Edit> edits;
  std::size_t source_len = 0;
  Granularity granularity = Granularity::character();

  std::size_t size() const noexcept { return edits.size(); }
  bool empty() const noexcept { return edits.empty(); }

  friend bool operator==(const EditSet&, const EditSet&) = default;
};

enum class AlignOp : std::uint8_t { Match, Substitute, Delete, Insert };

/// One step of an alignment script. `source_pos`/`target_pos` count the tokens
/// consumed before this step.
struct AlignStep {
  AlignOp op;
  std::size_t source_pos;
  std::size_t target_pos;
};

/// Number of non-match steps (the unit-cost edit distance for an optimal script).
std::size_t operation_count(std::span<const AlignStep> script) noexcept;

namespace detail {
std::vector<std::uint32_t>& dp_workspace();
}  // namespace detail

/// Unit-cost Levenshtein script. Ties in traceback (scanning from the end)
/// prefer Match > Substitute > Delete > Insert.
template <class T>
std::vector<AlignStep> alignment_script(std::span<const T> source, std::span<const T> target) {
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  const std::size_t width = m + 1;
  auto& dp = detail::dp_workspace();
  dp.assign((n + 1) * width, 0);
  const auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return dp[i * width + j]; };

  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (source[i - 1] == target[j - 1] ? 0u : 1u);
      const std::uint32_t del = at(i - 1, j) + 1;
      const std::uint32_t ins = at(i, j - 1) + 1;
      at(i, j) = std::min({diag, del, ins});
    }
  }

  std::vector<AlignStep> steps;
  steps.reserve(n + m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t cur = at(i, j);
    if (i > 0 && j > 0) {
      const bool same = source[i - 1] == target[j - 1];
      if (same && at(i - 1, j - 1) == cur) {
        steps.push_back({AlignOp::Match, --i, --j});
        continue;
      }
      if (!same && at(i - 1, j - 1) + 1 == cur) {
        steps.push_back({AlignOp::Substitute, --i, --j});
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1 == cur) {
      steps.push_back({AlignOp::Delete, --i, j});
    } else {
      steps.push_back({AlignOp::Insert, i, --j});
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

/// Collapses maximal runs of adjacent non-match steps into single edits.
template <class T>
std::vector<BasicEdit<T>> merge_script(std::span<const AlignStep> script, std::span<const T> target) {
  std::vector<BasicEdit<T>> edits;
  bool open = false;
  for (const AlignStep& step : script) {
    if (step.op == AlignOp::Match) {
      open = false;
      continue;
    }
    if (!open) {
      edits.push_back({step.source_pos, step.source_pos, {}});
      open = true;
    }
    BasicEdit<T>& e = edits.back();
    if (step.op != AlignOp::Insert) e.end = step.source_pos + 1;
    if (step.op != AlignOp::Delete) e.replacement.push_back(target[step.target_pos]);
  }
  return edits;
}

/// Checks bounds (BoundsError), the null-edit ban (InvariantError), and
/// ordering / overlap (OverlapError).
template <class T>
void validate_edits(std::span<const BasicEdit<T>> edits, std::size_t source_len) {
  for (std::size_t k = 0; k < edits.size(); ++k) {
    const auto& e = edits[k];
    if (e.start > e.end || e.end > source_len) {
      throw BoundsError("edit " + std::to_string(k) + " span [" + std::to_string(e.start) + "," +
                        std::to_string(e.end) + ") outside source of length " +
                        std::to_string(source_len));
    }
    if (e.start == e.end && e.replacement.empty()) {
      throw InvariantError("edit " + std::to_string(k) + " is a null edit");
    }
    if (k == 0) continue;
    const auto& prev = edits[k - 1];
    const bool both_insert_here = prev.start == prev.end && e.start == e.end && prev.start == e.start;
    if (prev.end > e.start || both_insert_here) {
      throw OverlapError("edits " + std::to_string(k - 1) + " and " + std::to_string(k) +
                         " overlap or are out of order");
    }
  }
}

template <class T>
std::vector<T> apply_edits(std::span<const T> source, std::span<const BasicEdit<T>> edits) {
  validate_edits(edits, source.size());
  std::vector<T> out;
  out.reserve(source.size() + edits.size());
  std::size_t cursor = 0;
  for (const auto& e : edits) {
    out.insert(out.end(), source.begin() + cursor, source.begin() + e.start);
    out.insert(out.end(), e.replacement.begin(), e.replacement.end());
    cursor = e.end;
  }
  out.insert(out.end(), source.begin() + cursor, source.end());
  return out;
}

/// Canonical minimal edit set transforming `source` into `target`.
EditSet extract_edits(const Tokens& source, const Tokens& target,
                      const Granularity& granularity = Granularity::character());

/// Throws BoundsError when `edits.source_len` disagrees with `source`.
Tokens apply_edits(const Tokens& source, const EditSet& edits);

// ---------------------------------------------------------------------------
// Tokenization

struct Segmenter {
  std::function<Tokens(std::string_view)> split;
  /// Rebuilds text from tokens; must invert `split` on normalized text.
  std::function<std::string(const Tokens&)> join;
};

/// Registers (or replaces) a named word segmenter. Thread-safe.
void register_segmenter(std::string name, Segmenter segmenter);
bool has_segmenter(std::string_view name);

/// Joins tokens with a single space only where both neighbouring scalars are
/// non-CJK. Suitable `join` for segmenters that split CJK without spaces.
std::string join_script_aware(const Tokens& tokens);

/// Throws ConfigError for an unknown segmenter.
Tokens tokenize(std::string_view text, const Granularity& granularity);
std::string detokenize(const Tokens& tokens, const Granularity& granularity);

}  // namespace gecforge::align
