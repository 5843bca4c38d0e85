#include <doctest.h>

#include <algorithm>
#include <array>

#include "morphsep/synth.hpp"
#include "morphsep/tv.hpp"
#include "testkit.hpp"

using namespace morphsep;
using testkit::Gen;

namespace {

// Both update lines executed once on a 3 x 3 grid, indexed [n][m] with n the
// frame and m the bin; out-of-range neighbours read as 0.
struct Sweep {
  std::array<std::array<double, 3>, 3> h{}, p{};
};

Sweep literal_sweep(const std::array<std::array<double, 3>, 3>& w, double l1, double l2) {
  Sweep s;
  auto at = [](const std::array<std::array<double, 3>, 3>& a, int n, int m) {
    return (n < 0 || n > 2 || m < 0 || m > 2) ? 0.0 : a[n][m];
  };
  for (int n = 0; n < 3; ++n)
    for (int m = 0; m < 3; ++m)
      s.h[n][m] = std::max(0.0, std::min((at(s.h, n + 1, m) + at(s.h, n - 1, m)) / 2 + l1 / 2, w[n][m] - s.p[n][m]));
  for (int n = 0; n < 3; ++n)
    for (int m = 0; m < 3; ++m)
      s.p[n][m] = std::max(0.0, std::min((at(s.p, n, m + 1) + at(s.p, n, m - 1)) / 2 + l1 / (2 * l2), w[n][m] - s.h[n][m]));
  return s;
}

double share(const MaskSet& set, std::size_t i) {
  double total = 0.0;
  for (const auto& m : set.masks) total += m.values.sum();
  return set.masks[i].values.sum() / total;
}

}  // namespace

TEST_CASE("tv config") {
  TvConfig cfg;
  CHECK(cfg.harmonic_step() == doctest::Approx(0.0125));
  CHECK(cfg.percussive_step() == doctest::Approx(0.05));
  cfg.increments = TvIncrements::as_written;
  CHECK(cfg.harmonic_step() == doctest::Approx(0.125));
  CHECK(cfg.percussive_step() == doctest::Approx(5.0));
  cfg.gamma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.lambda2 = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.n_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("one sweep matches the update lines worked by hand") {
  TvConfig cfg;
  cfg.increments = TvIncrements::as_written;
  cfg.n_iter = 1;
  Gen g(41);
  std::vector<std::array<std::array<double, 3>, 3>> cases(1);
  for (auto& row : cases[0]) row.fill(1.0);
  for (int i = 0; i < 20; ++i) {
    std::array<std::array<double, 3>, 3> w{};
    for (auto& row : w)
      for (auto& v : row) v = g.uniform(0.0, 8.0);
    cases.push_back(w);
  }
  for (const auto& w : cases) {
    RealMatrix wm(3, 3);  // bins x frames
    for (int n = 0; n < 3; ++n)
      for (int m = 0; m < 3; ++m) wm(m, n) = w[n][m];
    const MaskSet set = tv_masks(wm, cfg);
    const Sweep ref = literal_sweep(w, cfg.lambda1, cfg.lambda2);
    for (int n = 0; n < 3; ++n)
      for (int m = 0; m < 3; ++m) {
        CHECK(set.masks[1].values(m, n) == doctest::Approx(ref.h[n][m]).epsilon(1e-15));
        CHECK(set.masks[2].values(m, n) == doctest::Approx(ref.p[n][m]).epsilon(1e-15));
        CHECK(set.masks[0].values(m, n) == doctest::Approx(std::max(0.0, w[n][m] - ref.h[n][m] - ref.p[n][m])));
      }
  }
}

TEST_CASE("masks stay feasible after every sweep") {
  Gen g(42);
  for (auto inc : {TvIncrements::stationary, TvIncrements::as_written}) {
    for (int trial = 0; trial < 4; ++trial) {
      const RealMatrix w = g.matrix(g.integer(1, 40), g.integer(1, 40), 0.0, g.uniform(0.01, 10.0));
      TvConfig cfg;
      cfg.increments = inc;
      int sweeps = 0;
      const MaskSet set = tv_masks(w, cfg, [&](int, const RealMatrix& h, const RealMatrix& p) {
        ++sweeps;
        const RealMatrix v = (w - h - p).cwiseMax(0.0);
        CHECK(h.minCoeff() >= 0.0);
        CHECK(p.minCoeff() >= 0.0);
        CHECK((w - h - p).minCoeff() >= -1e-12);
        CHECK((v + h + p - w).cwiseAbs().maxCoeff() < 1e-9);
      });
      CHECK(sweeps == 200);
      CHECK(set.alpha == doctest::Approx(2.0));
      CHECK((set.masks[0].values + set.masks[1].values + set.masks[2].values - w).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("zero and invalid input") {
  const MaskSet set = tv_masks(RealMatrix::Zero(6, 5), {});
  for (const auto& m : set.masks) CHECK(m.values.maxCoeff() == 0.0);
  RealMatrix bad = RealMatrix::Ones(3, 3);
  bad(1, 2) = -0.5;
  CHECK_THROWS_AS(tv_masks(bad, {}), Error);
}

TEST_CASE("rows go to the harmonic mask, columns to the percussive mask") {
  for (double level : {0.5, 1.0, 4.0}) {
    CAPTURE(level);
    RealMatrix row = RealMatrix::Zero(30, 60);
    row.row(12).setConstant(level);
    CHECK(share(tv_masks(row, {}), 1) >= 0.6);
    RealMatrix col = RealMatrix::Zero(60, 30);
    col.col(12).setConstant(level);
    CHECK(share(tv_masks(col, {}), 2) >= 0.6);
  }
}

TEST_CASE("tv separation of tone and clicks") {
  auto [tone, clicks] = tone_and_clicks(22050, 2.0);
  auto harmonic_share = [](const Separation& sep, SourceRole role) {
    double total = 0.0;
    for (const auto& s : sep) total += energy(s.signal);
    return energy(find_role(sep, role)->signal) / total;
  };
  const Separation a = tv_separate(tone);
  REQUIRE(a.size() == 3);
  CHECK(a[0].signal.size() == tone.size());
  CHECK(a[0].signal.sample_rate == 22050);
  CHECK(harmonic_share(a, SourceRole::harmonic) >= 0.6);
  CHECK(harmonic_share(tv_separate(clicks), SourceRole::percussive) >= 0.6);

  for (const auto& s : tv_separate(AudioSignal(std::vector<double>(8000, 0.0), 16000)))
    CHECK(energy(s.signal) == 0.0);
}
