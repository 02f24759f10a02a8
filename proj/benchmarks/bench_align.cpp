#include <benchmark/benchmark.h>

#include <random>

#include "gecforge/align.hpp"
#include "gecforge/text.hpp"

using namespace gecforge;

namespace {

// Source of `n` random CJK characters and a copy with roughly one edit in ten.
std::pair<align::Tokens, align::Tokens> sentence_pair(std::size_t n) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::uint32_t> cp(0x4E00, 0x4E3F);
  auto ch = [&] { return encode_utf8(std::u32string(1, static_cast<char32_t>(cp(rng)))); };
  align::Tokens src(n), tgt;
  for (auto& t : src) t = ch();
  for (const auto& t : src) {
    switch (rng() % 30) {
      case 0: break;
      case 1: tgt.push_back(t), tgt.push_back(ch()); break;
      case 2: tgt.push_back(ch()); break;
      default: tgt.push_back(t);
    }
  }
  return {src, tgt};
}

void BM_ExtractEdits(benchmark::State& state) {
  const auto [src, tgt] = sentence_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(align::extract_edits(src, tgt));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExtractEdits)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_AlignChars(benchmark::State& state) {
  const std::string src(static_cast<std::size_t>(state.range(0)), 'a');
  std::string tgt = src;
  for (std::size_t i = 0; i < tgt.size(); i += 7) tgt[i] = 'b';
  for (auto _ : state) {
    const auto script = align::alignment_script<char>(src, tgt);
    benchmark::DoNotOptimize(align::merge_script<char>(script, tgt));
  }
}
BENCHMARK(BM_AlignChars)->Arg(8)->Arg(64)->Arg(512);

void BM_TokenizeWord(benchmark::State& state) {
  const std::string text = "他昨天去了学校 and met his teacher, 然后回家吃饭。";
  const auto g = align::Granularity::word();
  for (auto _ : state) {
    benchmark::DoNotOptimize(align::tokenize(text, g));
  }
}
BENCHMARK(BM_TokenizeWord);

}  // namespace
