#include <random>

#include <benchmark/benchmark.h>

#include "morphsep/kam.hpp"
#include "morphsep/rpca.hpp"
#include "morphsep/stft.hpp"
#include "morphsep/synth.hpp"
#include "morphsep/tv.hpp"

using namespace morphsep;

namespace {

AudioSignal noise(double seconds, double rate = 22050.0) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(0.0, 0.1);
  std::vector<double> s(static_cast<std::size_t>(seconds * rate));
  for (auto& v : s) v = d(rng);
  return {std::move(s), rate};
}

RealMatrix random_matrix(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

void BM_stft(benchmark::State& state) {
  const AudioSignal x = noise(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stft(x, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_stft)->Arg(1)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_stft_round_trip(benchmark::State& state) {
  const AudioSignal x = noise(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(istft(stft(x, {})));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_stft_round_trip)->Arg(10)->Unit(benchmark::kMillisecond);

// one spectrogram's worth of singular value thresholding: 1025 bins by frames
void BM_svt(benchmark::State& state) {
  const RealMatrix m = random_matrix(1025, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(svt(m, 1.0));
}
BENCHMARK(BM_svt)->Arg(44)->Arg(216)->Arg(431)->Unit(benchmark::kMillisecond);

void BM_pcp(benchmark::State& state) {
  const auto n = state.range(0);
  const RealMatrix m = random_matrix(n, n);
  RpcaConfig cfg;
  cfg.n_iter = 50;
  cfg.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(pcp(m, cfg));
}
BENCHMARK(BM_pcp)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_median_filter(benchmark::State& state) {
  const RealMatrix m = random_matrix(1025, 431);
  const Kernel k = state.range(0) == 0 ? kernel_harmonic(17) : kernel_cross(17, 17);
  for (auto _ : state) benchmark::DoNotOptimize(median_filter(m, k));
  state.SetLabel(state.range(0) == 0 ? "1x17" : "17x17 cross");
}
BENCHMARK(BM_median_filter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_kam_hpss(benchmark::State& state) {
  const auto [tone, clicks] = tone_and_clicks(22050, static_cast<double>(state.range(0)));
  const Stft x = stft(tone + clicks, {});
  for (auto _ : state) benchmark::DoNotOptimize(kam_hpss(x));
}
BENCHMARK(BM_kam_hpss)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_tv_masks(benchmark::State& state) {
  const RealMatrix w = random_matrix(513, state.range(0));
  TvConfig cfg;
  cfg.n_iter = 50;
  for (auto _ : state) benchmark::DoNotOptimize(tv_masks(w, cfg));
}
BENCHMARK(BM_tv_masks)->Arg(160)->Arg(625)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
