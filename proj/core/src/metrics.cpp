#include "gecforge/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "gecforge/errors.hpp"
#include "gecforge/text.hpp"

namespace gecforge::metrics {

using json = nlohmann::ordered_json;

double compute_f_beta(double p, double r, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be a positive real");
  if (!(p >= 0.0 && p <= 1.0) || !(r >= 0.0 && r <= 1.0)) {
    throw DomainError("precision and recall must lie in [0, 1]");
  }
  const double b2 = beta * beta;
  const double denom = b2 * p + r;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * p * r / denom;
}

Fractions fractions(std::size_t correct, std::size_t predicted, std::size_t n_gold) {
  Fractions f;
  f.precision = predicted == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(predicted);
  f.recall = n_gold == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(n_gold);
  return f;
}

MatchCounts match_edits(const align::EditSet& predicted, const align::EditSet& gold) {
  if (predicted.granularity != gold.granularity) {
    throw GranularityError("predicted edits at " + predicted.granularity.to_string() +
                           " but gold edits at " + gold.granularity.to_string());
  }
  if (predicted.source_len != gold.source_len) {
    throw BoundsError("predicted and gold edit sets describe sources of different length");
  }
  // Valid edit sets are sorted and non-overlapping, so an exact-match
  // multiset intersection is a one-to-one matching.
  std::multiset<std::pair<std::pair<std::size_t, std::size_t>, align::Tokens>> gold_pool;
  for (const auto& g : gold.edits) gold_pool.insert({{g.start, g.end}, g.replacement});

  MatchCounts c;
  c.n_gold = gold.edits.size();
  for (const auto& p : predicted.edits) {
    const auto it = gold_pool.find({{p.start, p.end}, p.replacement});
    if (it != gold_pool.end()) {
      ++c.tp;
      gold_pool.erase(it);
    } else {
      ++c.fp;
    }
  }
  c.fn = c.n_gold - c.tp;
  return c;
}

std::optional<ReferenceChoice> best_reference(const align::EditSet& predicted,
                                              const std::vector<align::EditSet>& gold_sets, double beta) {
  std::optional<ReferenceChoice> best;
  double best_f = -1.0;
  for (std::size_t r = 0; r < gold_sets.size(); ++r) {
    const MatchCounts c = match_edits(predicted, gold_sets[r]);
    const Fractions fr = fractions(c.tp, c.tp + c.fp, c.n_gold);
    const double f = compute_f_beta(fr.precision, fr.recall, beta);
    if (f > best_f) {
      best_f = f;
      best = ReferenceChoice{r, c};
    }
  }
  return best;
}

namespace {

struct ResolvedSentence {
  const corpus::CorrectionSample* sample;
  align::EditSet predicted;
  std::vector<align::EditSet> gold;
};

std::vector<ResolvedSentence> resolve(const std::vector<corpus::Prediction>& predictions,
                                      const std::vector<corpus::CorrectionSample>& samples,
                                      const align::Granularity& granularity) {
  std::unordered_map<std::string_view, const corpus::CorrectionSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.id, &s);
  std::vector<std::string> missing;
  for (const auto& p : predictions) {
    if (!by_id.contains(p.sample_id)) missing.push_back(p.sample_id);
  }
  if (!missing.empty()) throw MissingSampleError(std::move(missing));

  std::vector<ResolvedSentence> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) {
    const corpus::CorrectionSample* s = by_id.at(p.sample_id);
    const align::Tokens src = align::tokenize(s->source, granularity);
    const align::Tokens hyp = align::tokenize(normalize_text(p.hypothesis), granularity);
    out.push_back({s, align::extract_edits(src, hyp, granularity), corpus::gold_edit_sets(*s, granularity)});
  }
  return out;
}

ScoreReport finish(std::vector<SentenceScore<MatchCounts>> sentences, double beta) {
  ScoreReport report;
  report.beta = beta;
  for (const auto& s : sentences) report.counts += s.counts;
  const Fractions fr = fractions(report.counts.tp, report.counts.tp + report.counts.fp, report.counts.n_gold);
  report.precision = fr.precision;
  report.recall = fr.recall;
  report.f_beta = compute_f_beta(fr.precision, fr.recall, beta);
  report.per_sentence = std::move(sentences);
  return report;
}

// A sample without references is scored against the empty gold set: every
// predicted edit is a false positive.
MatchCounts unreferenced(const align::EditSet& predicted) {
  MatchCounts c;
  c.fp = predicted.edits.size();
  return c;
}

}  // namespace

ScoreReport score_corpus(const std::vector<corpus::Prediction>& predictions,
                         const std::vector<corpus::CorrectionSample>& samples,
                         const align::Granularity& granularity, double beta) {
  compute_f_beta(0.0, 0.0, beta);  // validates beta
  std::vector<SentenceScore<MatchCounts>> sentences;
  for (const auto& r : resolve(predictions, samples, granularity)) {
    SentenceScore<MatchCounts> s{r.sample->id, std::nullopt, unreferenced(r.predicted)};
    if (const auto choice = best_reference(r.predicted, r.gold, beta)) {
      s.reference_index = choice->index;
      s.counts = choice->counts;
    }
    sentences.push_back(std::move(s));
  }
  return finish(std::move(sentences), beta);
}

ScoreReport score_corpus_pinned(const std::vector<corpus::Prediction>& predictions,
                                const std::vector<corpus::CorrectionSample>& samples,
                                const align::Granularity& granularity, std::size_t index, double beta) {
  compute_f_beta(0.0, 0.0, beta);
  std::vector<SentenceScore<MatchCounts>> sentences;
  for (const auto& r : resolve(predictions, samples, granularity)) {
    SentenceScore<MatchCounts> s{r.sample->id, std::nullopt, unreferenced(r.predicted)};
    if (!r.gold.empty()) {
      const std::size_t k = std::min(index, r.gold.size() - 1);
      s.reference_index = k;
      s.counts = match_edits(r.predicted, r.gold[k]);
    }
    sentences.push_back(std::move(s));
  }
  return finish(std::move(sentences), beta);
}

std::string format_percent(double fraction) {
  const double scaled = std::floor(fraction * 10000.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", scaled / 100.0);
  return buf;
}

std::string format_table(double precision, double recall, double f_beta, double beta, const std::string& label) {
  char fname[16];
  std::snprintf(fname, sizeof fname, "F%g", beta);
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s\n", "", "P", "R", fname);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s\n", label.empty() ? "score" : label.c_str(),
                format_percent(precision).c_str(), format_percent(recall).c_str(), format_percent(f_beta).c_str());
  out += buf;
  return out;
}

json to_json(const MatchCounts& c) {
  json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["n_gold"] = c.n_gold;
  return j;
}

json to_json(const ScoreReport& report) {
  json j;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f_beta"] = report.f_beta;
  j["beta"] = report.beta;
  j["counts"] = to_json(report.counts);
  j["per_sentence"] = json::array();
  for (const auto& s : report.per_sentence) {
    json row;
    row["id"] = s.sample_id;
    row["reference"] = s.reference_index ? json(*s.reference_index) : json(nullptr);
    row["counts"] = to_json(s.counts);
    j["per_sentence"].push_back(std::move(row));
  }
  return j;
}

}  // namespace gecforge::metrics
