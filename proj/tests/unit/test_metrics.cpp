#include <doctest.h>

#include <cmath>

#include "morphsep/metrics.hpp"
#include "testkit.hpp"

using namespace morphsep;
using testkit::Gen;

namespace {

AudioSignal sig(std::vector<double> v) { return AudioSignal(std::move(v), 8000); }

AudioSignal combo(const std::vector<std::pair<double, const AudioSignal*>>& terms) {
  AudioSignal out(std::vector<double>(terms.front().second->size(), 0.0), 8000);
  for (const auto& [c, s] : terms)
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += c * s->samples[i];
  return out;
}

// Orthonormal basis of the given signals by modified Gram-Schmidt.
std::vector<std::vector<double>> orthonormal(const std::vector<AudioSignal>& refs) {
  std::vector<std::vector<double>> q;
  for (const auto& r : refs) {
    std::vector<double> v = r.samples;
    for (const auto& b : q) {
      double d = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * b[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
    }
    const double n = std::sqrt(energy(v));
    for (auto& x : v) x /= n;
    q.push_back(v);
  }
  return q;
}

// Orthogonal signals: disjoint supports.
std::vector<AudioSignal> disjoint_unit_signals(Gen& g, int count, std::size_t len) {
  std::vector<AudioSignal> out;
  for (int k = 0; k < count; ++k) {
    std::vector<double> v(len * count, 0.0);
    for (std::size_t i = 0; i < len; ++i) v[k * len + i] = g.normal();
    AudioSignal s = sig(v);
    out.push_back(scaled(s, 1.0 / std::sqrt(energy(s))));
  }
  return out;
}

}  // namespace

TEST_CASE("rqf") {
  Gen g(61);
  const AudioSignal s = g.signal(1000);
  CHECK(rqf(s, s) == kSentinelDb);
  CHECK(rqf(s, scaled(s, 0.5)) == doctest::Approx(6.0206).epsilon(1e-5));
  CHECK(std::abs(rqf(s, scaled(s, 0.5)) - 6.0206) < 1e-4);
  for (double eps : {1e-1, 1e-2, 1e-3})
    CHECK(std::abs(rqf(s, scaled(s, 1.0 - eps)) + 20.0 * std::log10(eps)) < 1e-6);
  // equal error and signal energy
  const auto refs = disjoint_unit_signals(g, 2, 500);
  CHECK(std::abs(rqf(refs[0], refs[0] + refs[1])) < 1e-12);
  CHECK_THROWS_AS(rqf(sig({0, 0, 0}), sig({1, 2, 3})), Error);
  CHECK_THROWS_AS(rqf(s, sig({1.0})), Error);
}

TEST_CASE("bss analytic cases") {
  Gen g(62);
  const auto refs = disjoint_unit_signals(g, 3, 400);
  const auto& s1 = refs[0];
  const auto& s2 = refs[1];

  SUBCASE("perfect estimate") {
    const BssScore r = bss_eval(s1, refs, 0);
    CHECK(r.sdr_db == kSentinelDb);
    CHECK(r.sir_db == kSentinelDb);
    CHECK(r.sar_db == kSentinelDb);
  }
  SUBCASE("leakage only") {
    const BssScore r = bss_eval(combo({{1.0, &s1}, {0.1, &s2}}), refs, 0);
    CHECK(std::abs(r.sir_db - 20.0) < 1e-6);
    CHECK(r.sar_db == kSentinelDb);
    CHECK(std::abs(r.sdr_db - 20.0) < 1e-6);
  }
  SUBCASE("artifact only") {
    // noise supported where no reference lives
    std::vector<double> w(s1.size(), 0.0);
    std::vector<double> extra(300);
    for (auto& v : extra) v = g.normal();
    w.insert(w.end(), extra.begin(), extra.end());
    AudioSignal noise = scaled(sig(w), 0.1 / std::sqrt(energy(w)));
    std::vector<AudioSignal> padded;
    for (const auto& r : refs) {
      auto v = r.samples;
      v.resize(w.size(), 0.0);
      padded.push_back(sig(v));
    }
    const BssScore r = bss_eval(padded[0] + noise, padded, 0);
    CHECK(std::abs(r.sar_db - 20.0) < 1e-6);
    CHECK(std::abs(r.sdr_db - 20.0) < 1e-6);
    CHECK(r.sir_db == kSentinelDb);
  }
}

TEST_CASE("bss decomposition matches Gram-Schmidt projections") {
  Gen g(63);
  for (int trial = 0; trial < 20; ++trial) {
    const int count = g.integer(1, 4);
    std::vector<AudioSignal> refs;
    for (int k = 0; k < count; ++k) refs.push_back(g.signal(600));
    const AudioSignal est = g.signal(600);
    const std::size_t target = g.integer(0, count - 1);
    const BssDecomposition d = bss_decompose(est, refs, target);

    const auto q = orthonormal(refs);
    std::vector<double> proj(600, 0.0);
    for (const auto& b : q) {
      double c = 0.0;
      for (int i = 0; i < 600; ++i) c += est.samples[i] * b[i];
      for (int i = 0; i < 600; ++i) proj[i] += c * b[i];
    }
    const auto& r = refs[target].samples;
    double c = 0.0;
    for (int i = 0; i < 600; ++i) c += est.samples[i] * r[i];
    c /= energy(refs[target]);

    double e_sum = 0.0;
    for (int i = 0; i < 600; ++i) {
      CHECK(d.target[i] == doctest::Approx(c * r[i]).epsilon(1e-9).scale(1.0));
      CHECK(d.interference[i] + d.target[i] == doctest::Approx(proj[i]).epsilon(1e-9).scale(1.0));
      CHECK(d.artifact[i] == doctest::Approx(est.samples[i] - proj[i]).epsilon(1e-9).scale(1.0));
      e_sum += d.target[i] * d.target[i] + d.interference[i] * d.interference[i] + d.artifact[i] * d.artifact[i];
    }
    CHECK(std::abs(e_sum - energy(est)) <= 1e-8 * energy(est));
  }
}

TEST_CASE("bss scores ignore a common rescaling") {
  Gen g(64);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<AudioSignal> refs{g.signal(500), g.signal(500)};
    AudioSignal est = combo({{0.9, &refs[0]}, {0.2, &refs[1]}}) + g.signal(500, 8000, 0.05);
    const BssScore a = bss_eval(est, refs, 0);
    const double c = g.uniform(0.01, 100.0);
    for (auto& r : refs) r = scaled(r, c);
    const BssScore b = bss_eval(scaled(est, c), refs, 0);
    CHECK(a.sdr_db == doctest::Approx(b.sdr_db).epsilon(1e-9));
    CHECK(a.sir_db == doctest::Approx(b.sir_db).epsilon(1e-9));
    CHECK(a.sar_db == doctest::Approx(b.sar_db).epsilon(1e-9));
  }
}

TEST_CASE("bss errors") {
  Gen g(65);
  const AudioSignal a = g.signal(100), b = g.signal(100);
  CHECK_THROWS_AS(bss_eval(a, {a, sig(std::vector<double>(100, 0.0))}, 0), Error);
  CHECK_THROWS_AS(bss_eval(a, {a, scaled(a, 2.0)}, 0), Error);
  CHECK_THROWS_AS(bss_eval(a, {a, b}, 2), Error);
  CHECK_THROWS_AS(bss_eval(a, {sig({1.0, 2.0})}, 0), Error);
  CHECK_THROWS_AS(bss_eval(a, {}, 0), Error);
  const auto scores = score_separation({a, b}, {a, b});
  CHECK(scores[0].rqf_db == kSentinelDb);
  CHECK(scores[1].sir_db == kSentinelDb);
  CHECK_THROWS_AS(score_separation({a}, {a, b}), Error);
}

TEST_CASE("detection scores") {
  SUBCASE("recall 0.83 precision 0.63") {
    const double f = f_measure(0.83, 0.63);
    CHECK(f == doctest::Approx(0.7163).epsilon(1e-4));
    CHECK(std::round(f * 100) / 100 == doctest::Approx(0.72));
    CHECK(f_measure(0, 0) == 0.0);
  }
  SUBCASE("perfect and inverted predictions") {
    const std::vector<bool> truth{true, true, false, false, true};
    const DetectionScore s = detection_metrics(truth, truth);
    CHECK(s.av_rec == 1.0);
    CHECK(s.av_prec == 1.0);
    CHECK(s.f_meas == 1.0);
    std::vector<bool> inv;
    for (bool b : truth) inv.push_back(!b);
    const DetectionScore z = detection_metrics(inv, truth);
    CHECK(z.av_rec == 0.0);
    CHECK(z.av_prec == 0.0);
    CHECK(z.f_meas == 0.0);
  }
  SUBCASE("hand count") {
    // truth: 3 voice, 3 music; prediction hits 2 voice, 2 music
    const std::vector<bool> truth{true, true, true, false, false, false};
    const std::vector<bool> pred{true, true, false, true, false, false};
    const DetectionScore s = detection_metrics(pred, truth);
    CHECK(*s.voice.recall == doctest::Approx(2.0 / 3));
    CHECK(*s.voice.precision == doctest::Approx(2.0 / 3));
    CHECK(*s.music.recall == doctest::Approx(2.0 / 3));
    CHECK(s.f_meas == doctest::Approx(2.0 / 3));
  }
  SUBCASE("empty classes") {
    const std::vector<bool> music(10, false);
    const DetectionScore quiet = detection_metrics(music, music);
    CHECK(*quiet.voice.recall == 1.0);
    CHECK(*quiet.voice.precision == 1.0);
    CHECK(quiet.f_meas == 1.0);
    std::vector<bool> pred = music;
    pred[0] = true;
    const DetectionScore one = detection_metrics(pred, music);
    CHECK_FALSE(one.voice.recall.has_value());
    CHECK(*one.voice.precision == 0.0);
    CHECK(*one.music.recall == doctest::Approx(0.9));
    CHECK(one.av_rec == doctest::Approx(0.9));
  }
  SUBCASE("relabeling symmetry") {
    Gen g(66);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<bool> p, t, np, nt;
      const int n = g.integer(1, 40);
      for (int i = 0; i < n; ++i) {
        p.push_back(g.coin());
        t.push_back(g.coin());
        np.push_back(!p.back());
        nt.push_back(!t.back());
      }
      const DetectionScore a = detection_metrics(p, t), b = detection_metrics(np, nt);
      CHECK(a.f_meas == doctest::Approx(b.f_meas));
      CHECK(a.voice.recall == b.music.recall);
      CHECK(a.voice.precision == b.music.precision);
      CHECK(std::abs(a.f_meas - f_measure(a.av_rec, a.av_prec)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(detection_metrics({true}, {true, false}), Error);
}
