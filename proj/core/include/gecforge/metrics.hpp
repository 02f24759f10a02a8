#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gecforge/align.hpp"
#include "gecforge/corpus.hpp"

namespace gecforge::metrics {

/// Exact-match counts of predicted against gold edits. tp + fn == n_gold.
struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t n_gold = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn, n_gold += o.n_gold;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct Fractions {
  double precision = 1.0;
  double recall = 1.0;
};

/// (1+b^2)pr / (b^2 p + r), and 0 when p == r == 0. Throws DomainError for
/// beta <= 0 or p, r outside [0, 1].
double compute_f_beta(double precision, double recall, double beta);

/// P = tp/(tp+fp) with P := 1 when nothing was predicted; R = tp/n_gold with
/// R := 1 when there is no gold edit.
Fractions fractions(std::size_t correct, std::size_t predicted, std::size_t n_gold);

/// An edit matches iff start, end and replacement are all equal; matching is
/// one-to-one. Throws GranularityError when the sets were built at different
/// granularities and BoundsError when their source lengths differ.
MatchCounts match_edits(const align::EditSet& predicted, const align::EditSet& gold);

/// Index of the gold set maximising sentence-level F_beta (ties: lowest
/// index), with its counts. nullopt when `gold_sets` is empty.
struct ReferenceChoice {
  std::size_t index;
  MatchCounts counts;
};
std::optional<ReferenceChoice> best_reference(const align::EditSet& predicted,
                                              const std::vector<align::EditSet>& gold_sets, double beta);

template <class Counts>
struct SentenceScore {
  std::string sample_id;
  std::optional<std::size_t> reference_index;
  Counts counts;
};

/// Corpus-level precision / recall / F_beta with the winning per-sentence counts.
template <class Counts>
struct BasicScoreReport {
  double precision = 1.0;
  double recall = 1.0;
  double f_beta = 0.0;
  double beta = 0.5;
  Counts counts{};
  std::vector<SentenceScore<Counts>> per_sentence;
};

using ScoreReport = BasicScoreReport<MatchCounts>;

ScoreReport score_corpus(const std::vector<corpus::Prediction>& predictions,
                         const std::vector<corpus::CorrectionSample>& corpus,
                         const align::Granularity& granularity, double beta = 0.5);

/// Same scoring with every sentence pinned to reference `index` (clamped to
/// the sample's last reference). Used to audit best-reference selection.
ScoreReport score_corpus_pinned(const std::vector<corpus::Prediction>& predictions,
                                const std::vector<corpus::CorrectionSample>& corpus,
                                const align::Granularity& granularity, std::size_t index,
                                double beta = 0.5);

/// Percentage rounded half-up to two decimals, e.g. 0.46505 -> "46.51".
std::string format_percent(double fraction);

/// Fixed-width "P R F0.5" table in the layout of GEC results tables.
std::string format_table(double precision, double recall, double f_beta, double beta,
                         const std::string& label = "");

nlohmann::ordered_json to_json(const MatchCounts& counts);
nlohmann::ordered_json to_json(const ScoreReport& report);

}  // namespace gecforge::metrics
