#include "morphsep/stft.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fft.hpp"

namespace morphsep {

void StftConfig::validate() const {
  if (window_length == 0 || window_length % 2 != 0)
    throw Error("STFT window length must be even and positive");
  if (hop == 0) throw Error("STFT hop must be positive");
  if (hop > window_length) throw Error("STFT hop exceeds window length");
  if (!(sample_rate > 0.0)) throw Error("STFT sample rate must be positive");
}

StftConfig StftConfig::from_duration(double rate, double window_ms) {
  auto n = static_cast<std::size_t>(std::lround(rate * window_ms / 1000.0));
  n += n % 2;
  return StftConfig{n, n / 4, WindowType::hann, rate};
}

std::vector<double> make_window(WindowType type, std::size_t length) {
  std::vector<double> w(length);
  switch (type) {
    case WindowType::hann:
      // periodic form: exact constant overlap-add at hop = length / 4
      for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                    static_cast<double>(length));
      break;
  }
  return w;
}

std::size_t frame_count(std::size_t length, std::size_t hop) {
  return length / hop + 1;
}

Stft stft(const AudioSignal& x, const StftConfig& cfg) {
  if (x.empty()) throw Error("cannot analyse an empty signal");
  cfg.validate();

  const std::size_t n = cfg.window_length;
  const std::size_t half = n / 2;
  const std::size_t frames = frame_count(x.size(), cfg.hop);
  const auto window = make_window(cfg.window, n);

  Stft out{ComplexMatrix(static_cast<Eigen::Index>(cfg.bins()),
                         static_cast<Eigen::Index>(frames)),
           cfg, x.size()};

  detail::RealFft fft(n);
  std::vector<double> frame(n);
  std::vector<std::complex<double>> spec(cfg.bins());
  const auto len = static_cast<std::ptrdiff_t>(x.size());

  for (std::size_t t = 0; t < frames; ++t) {
    const auto start = static_cast<std::ptrdiff_t>(t * cfg.hop) -
                       static_cast<std::ptrdiff_t>(half);
    for (std::size_t k = 0; k < n; ++k) {
      const auto idx = start + static_cast<std::ptrdiff_t>(k);
      frame[k] = (idx >= 0 && idx < len) ? x.samples[static_cast<std::size_t>(idx)] * window[k]
                                         : 0.0;
    }
    fft.forward(frame, spec);
    for (std::size_t b = 0; b < spec.size(); ++b)
      out.data(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t)) = spec[b];
  }
  return out;
}

AudioSignal istft(const Stft& s) {
  const auto& cfg = s.config;
  cfg.validate();
  if (static_cast<std::size_t>(s.data.rows()) != cfg.bins())
    throw Error("STFT bin count does not match its window length");
  if (s.original_length == 0) throw Error("STFT has no original length");

  const std::size_t n = cfg.window_length;
  const std::size_t half = n / 2;
  const auto frames = static_cast<std::size_t>(s.data.cols());
  const auto window = make_window(cfg.window, n);

  // Accumulate on the padded axis, then crop.
  const std::size_t padded = (frames == 0 ? 0 : (frames - 1) * cfg.hop) + n;
  std::vector<double> acc(padded, 0.0);
  std::vector<double> norm(padded, 0.0);

  detail::RealFft fft(n);
  std::vector<std::complex<double>> spec(cfg.bins());
  std::vector<double> frame(n);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t b = 0; b < spec.size(); ++b)
      spec[b] = s.data(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t));
    fft.inverse(spec, frame);
    const std::size_t start = t * cfg.hop;
    for (std::size_t k = 0; k < n; ++k) {
      acc[start + k] += frame[k] * inv_n * window[k];
      norm[start + k] += window[k] * window[k];
    }
  }

  AudioSignal out(std::vector<double>(s.original_length, 0.0), cfg.sample_rate);
  for (std::size_t i = 0; i < s.original_length; ++i) {
    const std::size_t p = i + half;
    if (p < padded && norm[p] > 1e-12) out.samples[i] = acc[p] / norm[p];
  }
  return out;
}

RealMatrix spectrogram(const Stft& s, double gamma) {
  if (!(gamma > 0.0)) throw Error("spectrogram exponent must be positive");
  RealMatrix w = s.data.cwiseAbs2();
  if (gamma != 1.0) w = w.array().pow(gamma).matrix();
  return w;
}

RealMatrix magnitude(const Stft& s) { return s.data.cwiseAbs(); }

}  // namespace morphsep
