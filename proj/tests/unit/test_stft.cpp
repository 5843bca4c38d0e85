#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "morphsep/stft.hpp"
#include "testkit.hpp"

using namespace morphsep;
using testkit::Gen;

TEST_CASE("stft shape and centering") {
  const StftConfig cfg;
  const AudioSignal x(std::vector<double>(22050, 0.0), 22050);
  const Stft s = stft(x, cfg);
  CHECK(s.bins() == 1025);
  CHECK(s.frames() == static_cast<Eigen::Index>(22050 / 512 + 1));
  CHECK(s.data.cwiseAbs().maxCoeff() == 0.0);
  CHECK(istft(s).samples == x.samples);
}

TEST_CASE("stft frames match a direct DFT of the windowed, zero-padded segment") {
  Gen g(11);
  StftConfig cfg{64, 16, WindowType::hann, 8000};
  const AudioSignal x = g.signal(300, 8000);
  const Stft s = stft(x, cfg);
  const auto win = make_window(WindowType::hann, 64);
  for (Eigen::Index t : {Eigen::Index{0}, Eigen::Index{1}, Eigen::Index{7}, s.frames() - 1}) {
    std::vector<double> seg(64, 0.0);
    for (int k = 0; k < 64; ++k) {
      const long idx = t * 16 - 32 + k;
      if (idx >= 0 && idx < 300) seg[k] = x.samples[idx] * win[k];
    }
    const auto ref = testkit::naive_dft(seg);
    for (int b = 0; b <= 32; ++b) CHECK(std::abs(s.data(b, t) - ref[b]) < 1e-10);
  }
}

TEST_CASE("bin-centered sinusoid concentrates in three bins") {
  const StftConfig cfg;
  const int k = 40;
  const double f = k * cfg.sample_rate / cfg.window_length;
  const AudioSignal x(testkit::sine(44100, f, cfg.sample_rate), cfg.sample_rate);
  const Stft s = stft(x, cfg);
  for (Eigen::Index t = 4; t < s.frames() - 4; ++t) {
    const double total = s.data.col(t).squaredNorm();
    const double near = s.data.col(t).segment(k - 1, 3).squaredNorm();
    CHECK(near / total >= 0.95);
  }
}

TEST_CASE("round trip reconstruction") {
  Gen g(5);
  SUBCASE("random noise") {
    for (std::size_t n : {2049u, 4410u, 44100u}) {
      const AudioSignal x = g.signal(n);
      CHECK(testkit::rel_l2(istft(stft(x, {})).samples, x.samples) < 1e-10);
    }
  }
  SUBCASE("short signals and odd lengths") {
    for (std::size_t n : {1u, 7u, 511u, 513u}) {
      const AudioSignal x = g.signal(n);
      const AudioSignal y = istft(stft(x, {}));
      REQUIRE(y.size() == n);
      CHECK(testkit::rel_l2(y.samples, x.samples) < 1e-10);
    }
  }
  SUBCASE("440 Hz tone") {
    const AudioSignal x(testkit::sine(22050, 440, 22050), 22050);
    const AudioSignal y = istft(stft(x, {}));
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x.samples[i] - y.samples[i]));
    CHECK(worst < 1e-9);
  }
  SUBCASE("64 ms frames at 16 kHz") {
    const StftConfig cfg = StftConfig::from_duration(16000, 64);
    CHECK(cfg.window_length == 1024);
    CHECK(cfg.hop == 256);
    const AudioSignal x = g.signal(16000, 16000);
    CHECK(testkit::rel_l2(istft(stft(x, cfg)).samples, x.samples) < 1e-10);
  }
}

TEST_CASE("linearity") {
  Gen g(8);
  const AudioSignal x = g.signal(5000), y = g.signal(5000);
  const double a = 0.7, b = -1.3;
  AudioSignal mix(std::vector<double>(5000), 22050);
  for (int i = 0; i < 5000; ++i) mix.samples[i] = a * x.samples[i] + b * y.samples[i];
  const ComplexMatrix lhs = stft(mix, {}).data;
  const ComplexMatrix rhs = a * stft(x, {}).data + b * stft(y, {}).data;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff() * 100);
}

TEST_CASE("frame-summed energy is a fixed multiple of signal energy") {
  // Parseval per frame plus constant overlap-add of w^2 at 3/4 overlap.
  Gen g(21);
  std::vector<double> ratios;
  for (int trial = 0; trial < 8; ++trial) {
    AudioSignal x = g.signal(20000 + 17 * trial);
    // silent margins keep every sample under a full set of frames
    std::fill(x.samples.begin(), x.samples.begin() + 2048, 0.0);
    std::fill(x.samples.end() - 2048, x.samples.end(), 0.0);
    const Stft s = stft(x, {});
    double spec = 0.0;
    for (Eigen::Index t = 0; t < s.frames(); ++t) {
      const auto col = s.data.col(t);
      spec += std::norm(col(0)) + std::norm(col(s.bins() - 1));
      spec += 2.0 * col.segment(1, s.bins() - 2).squaredNorm();
    }
    ratios.push_back(spec / energy(x));
  }
  for (double r : ratios) CHECK(std::abs(r / ratios.front() - 1.0) < 1e-6);
}

TEST_CASE("modified spectra stay finite") {
  Gen g(3);
  Stft s = stft(g.signal(8000), {});
  s.data.row(100).setZero();
  s.data.col(3).setZero();
  const AudioSignal y = istft(s);
  for (double v : y.samples) CHECK(std::isfinite(v));
}

TEST_CASE("spectrogram") {
  Stft s;
  s.data = ComplexMatrix::Constant(2, 2, {3.0, 4.0});
  CHECK(spectrogram(s, 1.0)(0, 0) == doctest::Approx(25.0));
  CHECK(spectrogram(s, 0.25)(1, 1) == doctest::Approx(2.2360679775).epsilon(1e-10));
  s.data.setZero();
  CHECK(spectrogram(s, 0.25).maxCoeff() == 0.0);
  CHECK(magnitude(stft(AudioSignal({1.0, 2.0, 3.0}, 100), {8, 2, WindowType::hann, 100})).minCoeff() >= 0.0);
  CHECK_THROWS_AS(spectrogram(s, 0.0), Error);
}

TEST_CASE("stft rejects bad input") {
  CHECK_THROWS_AS(stft(AudioSignal({}, 22050), {}), Error);
  CHECK_THROWS_AS(stft(AudioSignal({1.0}, 22050), {2048, 4096}), Error);
  CHECK_THROWS_AS(stft(AudioSignal({1.0}, 22050), {2047, 512}), Error);
  Stft s = stft(AudioSignal({1.0, 2.0}, 22050), {});
  s.data.conservativeResize(100, Eigen::NoChange);
  CHECK_THROWS_AS(istft(s), Error);
}
