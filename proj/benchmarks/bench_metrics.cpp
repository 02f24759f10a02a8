#include <benchmark/benchmark.h>

#include <random>

#include "gecforge/metrics.hpp"
#include "gecforge/text.hpp"

using namespace gecforge;

namespace {

std::string random_sentence(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<std::uint32_t> cp(0x4E00, 0x4E3F);
  std::u32string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char32_t>(cp(rng)));
  return encode_utf8(s);
}

// Replaces one character in every `stride` with a fixed one.
std::string perturb(const std::string& text, std::size_t stride) {
  std::u32string s = decode_utf8(text);
  for (std::size_t i = 0; i < s.size(); i += stride) s[i] = U'的';
  return encode_utf8(s);
}

void BM_ScoreCorpus(benchmark::State& state) {
  std::mt19937 rng(11);
  std::vector<corpus::CorrectionSample> gold;
  std::vector<corpus::Prediction> preds;
  for (int i = 0; i < state.range(0); ++i) {
    const std::string src = random_sentence(rng, 30);
    const std::string id = "s" + std::to_string(i);
    gold.push_back({id, src, {perturb(src, 6), perturb(src, 9)}, std::nullopt});
    preds.push_back({id, perturb(src, 8)});
  }
  const auto g = align::Granularity::character();
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::score_corpus(preds, gold, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreCorpus)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ComputeFBeta(benchmark::State& state) {
  double p = 0.5382, r = 0.3014;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p);
    benchmark::DoNotOptimize(r);
    benchmark::DoNotOptimize(metrics::compute_f_beta(p, r, 0.5));
  }
}
BENCHMARK(BM_ComputeFBeta);

}  // namespace
