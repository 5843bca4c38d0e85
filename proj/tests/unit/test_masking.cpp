#include <doctest.h>

#include <cmath>

#include "morphsep/masking.hpp"
#include "morphsep/metrics.hpp"
#include "morphsep/synth.hpp"
#include "testkit.hpp"

using namespace morphsep;
using testkit::Gen;

namespace {

Stft random_stft(Gen& g, Eigen::Index f, Eigen::Index t) {
  Stft s;
  s.data = g.complex_matrix(f, t);
  s.config = {static_cast<std::size_t>(2 * (f - 1)), static_cast<std::size_t>(f - 1) / 2, WindowType::hann, 8000};
  s.original_length = 1000;
  return s;
}

MaskSet mask_set(std::vector<RealMatrix> ms, double alpha) {
  MaskSet set;
  set.alpha = alpha;
  for (auto& m : ms) set.masks.push_back({SourceRole::other, std::move(m)});
  return set;
}

}  // namespace

TEST_CASE("single-bin Wiener fractions") {
  std::vector<double> out(3);
  SUBCASE("identical masks split evenly") {
    for (double a : {0.5, 1.0, 2.0, 3.7}) {
      wiener_fractions(std::vector<double>{0.4, 0.4, 0.4}, a, out);
      for (double v : out) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
  }
  SUBCASE("one active mask takes everything") {
    out.resize(2);
    wiener_fractions(std::vector<double>{1.0, 0.0}, 2.0, out);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 0.0);
  }
  SUBCASE("alpha = 1 is proportional") {
    out.resize(2);
    wiener_fractions(std::vector<double>{2.0, 1.0}, 1.0, out);
    CHECK(out[0] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  }
  SUBCASE("silent bin splits uniformly") {
    wiener_fractions(std::vector<double>{0.0, 0.0, 0.0}, 2.0, out);
    for (double v : out) CHECK(v == 1.0 / 3);
  }
  SUBCASE("huge and tiny masks do not overflow") {
    out.resize(2);
    wiener_fractions(std::vector<double>{1e200, 1e199}, 3.0, out);
    CHECK(out[0] == doctest::Approx(1000.0 / 1001));
    wiener_fractions(std::vector<double>{1e-200, 1e-201}, 3.0, out);
    CHECK(out[0] == doctest::Approx(1000.0 / 1001));
  }
}

TEST_CASE("Wiener outputs sum to the mixture") {
  Gen g(101);
  for (int trial = 0; trial < 25; ++trial) {
    const int count = g.integer(2, 5);
    const Stft x = random_stft(g, 17, g.integer(1, 30));
    std::vector<RealMatrix> ms;
    for (int i = 0; i < count; ++i) {
      RealMatrix m = g.matrix(x.bins(), x.frames());
      for (Eigen::Index k = 0; k < m.size(); ++k)
        if (g.coin(0.2)) m.data()[k] = 0.0;
      ms.push_back(m);
    }
    const auto est = wiener_apply(x, mask_set(ms, g.uniform(0.3, 4.0)));
    ComplexMatrix sum = ComplexMatrix::Zero(x.bins(), x.frames());
    for (const auto& e : est) sum += e.data;
    CHECK((sum - x.data).norm() <= 1e-12 * x.data.norm());
  }
}

TEST_CASE("common mask scale does not change the estimates") {
  Gen g(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Stft x = random_stft(g, 9, 12);
    std::vector<RealMatrix> ms{g.matrix(9, 12), g.matrix(9, 12), g.matrix(9, 12)};
    const double alpha = g.uniform(0.5, 3.0);
    const double c = std::pow(10.0, g.uniform(-6, 6));
    std::vector<RealMatrix> scaled_ms;
    for (const auto& m : ms) scaled_ms.push_back(c * m);
    const auto a = wiener_apply(x, mask_set(ms, alpha));
    const auto b = wiener_apply(x, mask_set(scaled_ms, alpha));
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK((a[i].data - b[i].data).norm() <= 1e-12 * x.data.norm());
  }
}

TEST_CASE("dominant fraction grows with alpha") {
  Gen g(13);
  for (int trial = 0; trial < 200; ++trial) {
    const double m2 = g.uniform(0.01, 1.0);
    const double m1 = m2 * g.uniform(1.0001, 5.0);
    double last = 0.0;
    for (double a = 0.25; a <= 6.0; a += 0.25) {
      std::vector<double> out(2);
      wiener_fractions(std::vector<double>{m1, m2}, a, out);
      CHECK(out[0] >= last);
      last = out[0];
    }
  }
}

TEST_CASE("mask set validation") {
  const Stft x = [] {
    Gen g(1);
    return random_stft(g, 5, 4);
  }();
  CHECK_THROWS_AS(wiener_apply(x, MaskSet{}), Error);
  CHECK_THROWS_AS(wiener_apply(x, mask_set({RealMatrix::Ones(5, 4)}, 0.0)), Error);
  CHECK_THROWS_AS(wiener_apply(x, mask_set({RealMatrix::Ones(5, 4), RealMatrix::Ones(5, 3)}, 2)), Error);
  CHECK_THROWS_AS(wiener_apply(x, mask_set({RealMatrix::Ones(5, 3), RealMatrix::Ones(5, 3)}, 2)), Error);
  CHECK_THROWS_AS(wiener_apply(x, mask_set({-RealMatrix::Ones(5, 4), RealMatrix::Ones(5, 4)}, 2)), Error);
}

TEST_CASE("oracle masks") {
  Stft a, b;
  a.data = ComplexMatrix::Constant(3, 2, {3.0, 4.0});
  b.data = ComplexMatrix::Zero(3, 2);
  const MaskSet set = oracle_masks({a, b}, {SourceRole::voice, SourceRole::other});
  CHECK(set.masks[0].values(2, 1) == 5.0);
  CHECK(set.masks[1].values.maxCoeff() == 0.0);
  CHECK(set.masks[0].role == SourceRole::voice);
  CHECK_THROWS_AS(oracle_masks({a}, {SourceRole::voice}), Error);
  CHECK_THROWS_AS(oracle_masks({a, b}, {SourceRole::voice}), Error);
}

TEST_CASE("oracle separation: alpha = 2 is near the best RQF on the grid") {
  SceneOptions opts;
  opts.recipe = {Component::vibrato, Component::chord_loop};
  opts.duration = 6.0;
  opts.voice_segments = {{0, 6}};
  const Scene scene = make_scene(opts);
  const StftConfig cfg;
  const Stft x = stft(scene.mixture, cfg);
  const std::vector<Stft> refs{stft(scene.sources[0].signal, cfg), stft(scene.sources[1].signal, cfg)};

  auto mean_rqf = [&](double alpha) {
    const Separation sep = synthesize(x, oracle_masks(refs, {SourceRole::voice, SourceRole::harmonic}, alpha));
    return 0.5 * (rqf(scene.sources[0].signal, sep[0].signal) + rqf(scene.sources[1].signal, sep[1].signal));
  };
  double best = -1e9;
  for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) best = std::max(best, mean_rqf(a));
  CHECK(mean_rqf(2.0) >= best - 0.5);
}

TEST_CASE("synthesized estimates add back to the mixture") {
  SceneOptions opts;
  opts.recipe = {Component::vibrato, Component::drone, Component::clicks};
  opts.duration = 4.0;
  const Scene scene = make_scene(opts);
  const StftConfig cfg;
  std::vector<Stft> refs;
  for (const auto& s : scene.sources) refs.push_back(stft(s.signal, cfg));
  const Separation sep = synthesize(
      stft(scene.mixture, cfg),
      oracle_masks(refs, {SourceRole::voice, SourceRole::harmonic, SourceRole::percussive}));
  AudioSignal sum(std::vector<double>(scene.mixture.size(), 0.0), scene.mixture.sample_rate);
  for (const auto& s : sep) sum = sum + s.signal;
  CHECK(testkit::rel_l2(sum.samples, scene.mixture.samples) < 1e-9);
  REQUIRE(find_role(sep, SourceRole::percussive) != nullptr);
  CHECK(find_role(sep, SourceRole::accompaniment) == nullptr);
}
