#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tlm/chscore.h"
#include "tlm/curation.h"
#include "tlm/frames.h"
#include "tlm/stats.h"

namespace {

// Frames x grid points, roughly what a tracker returns for a short clip.
void BM_CHScoreFromVisibility(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  const int grid = static_cast<int>(state.range(1));
  const std::size_t points = static_cast<std::size_t>(grid) * grid;
  std::mt19937 rng(1);
  std::vector<std::uint8_t> flags(frames * points);
  for (auto& f : flags) f = rng() % 10 != 0;
  const auto vis = tlm::VisibilityMatrix::Create(frames, points, grid, flags);
  const tlm::CHScoreConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlm::CHScoreFromVisibility(vis, cfg).score);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(flags.size()));
}
BENCHMARK(BM_CHScoreFromVisibility)->Args({16, 10})->Args({128, 10})->Args({128, 50});

void BM_FrameDiffSeries(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const std::size_t count = 32;
  std::vector<std::uint8_t> data(count * side * side * 3);
  std::mt19937 rng(2);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng());
  const auto seq = tlm::FrameSequence::Create(side, side, 3, count, data);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlm::FrameDiffSeries(seq));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(data.size()));
}
BENCHMARK(BM_FrameDiffSeries)->Arg(64)->Arg(256);

void BM_KendallTau(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(rng);
    y[i] = x[i] + 0.3 * u(rng);
  }
  const auto sample = tlm::PairedSample::Create(x, y);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlm::KendallTau(sample));
  }
}
BENCHMARK(BM_KendallTau)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
