#include "morphsep/filters.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace morphsep {

namespace {

enum class Kind { lowpass, highpass };

// RBJ-style section; with the Q values below the cascade is an exact
// bilinear-transformed Butterworth.
Biquad section(Kind kind, double cutoff, double rate, double q) {
  const double w0 = 2.0 * std::numbers::pi * cutoff / rate;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  if (kind == Kind::lowpass) {
    s.b0 = (1.0 - cw) / 2.0 / a0;
    s.b1 = (1.0 - cw) / a0;
    s.b2 = s.b0;
  } else {
    s.b0 = (1.0 + cw) / 2.0 / a0;
    s.b1 = -(1.0 + cw) / a0;
    s.b2 = s.b0;
  }
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

SosFilter butterworth(Kind kind, int order, double cutoff, double rate) {
  if (order <= 0 || order % 2 != 0) throw Error("Butterworth order must be even and positive");
  if (!(cutoff > 0.0) || !(cutoff < rate / 2.0))
    throw Error("filter cutoff must lie strictly between 0 and Nyquist");
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
    sections.push_back(section(kind, cutoff, rate, 1.0 / (2.0 * std::sin(theta))));
  }
  return SosFilter(std::move(sections));
}

}  // namespace

void SosFilter::append(const SosFilter& other) {
  sections_.insert(sections_.end(), other.sections_.begin(), other.sections_.end());
}

std::vector<double> SosFilter::apply(const std::vector<double>& x) const {
  std::vector<double> y = x;
  for (const auto& s : sections_) {
    double z1 = 0.0, z2 = 0.0;
    for (auto& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

double SosFilter::gain_at(double freq_hz, double rate) const {
  const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / rate);
  const std::complex<double> zi = 1.0 / z;
  std::complex<double> h = 1.0;
  for (const auto& s : sections_)
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  return std::abs(h);
}

SosFilter butterworth_lowpass(int order, double cutoff_hz, double rate) {
  return butterworth(Kind::lowpass, order, cutoff_hz, rate);
}

SosFilter butterworth_highpass(int order, double cutoff_hz, double rate) {
  return butterworth(Kind::highpass, order, cutoff_hz, rate);
}

SosFilter bandpass_design(double low_hz, double high_hz, double rate) {
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < rate / 2.0))
    throw Error("band-pass edges must satisfy 0 < low < high < Nyquist");
  SosFilter f = butterworth_highpass(8, low_hz, rate);
  f.append(butterworth_lowpass(8, high_hz, rate));
  return f;
}

AudioSignal bandpass(const AudioSignal& x, double low_hz, double high_hz) {
  const auto f = bandpass_design(low_hz, high_hz, x.sample_rate);
  return AudioSignal(f.apply(x.samples), x.sample_rate);
}

AudioSignal highpass(const AudioSignal& x, double cutoff_hz, int order) {
  const auto f = butterworth_highpass(order, cutoff_hz, x.sample_rate);
  return AudioSignal(f.apply(x.samples), x.sample_rate);
}

}  // namespace morphsep
