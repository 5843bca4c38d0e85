#include "morphsep/yin.hpp"

#include <cmath>

namespace morphsep {

std::optional<double> yin_f0(std::span<const double> frame, double sample_rate,
                             const YinConfig& cfg) {
  if (!(cfg.f0_min > 0.0) || !(cfg.f0_max > cfg.f0_min))
    throw Error("YIN frequency range must satisfy 0 < f0_min < f0_max");
  const auto max_lag = static_cast<std::size_t>(std::ceil(sample_rate / cfg.f0_min));
  const auto min_lag = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sample_rate / cfg.f0_max)));
  if (frame.size() < 2 * max_lag) throw Error("YIN frame is shorter than two periods of f0_min");

  // lags up to max_lag + 1 are needed for the parabolic refinement
  const std::size_t span = frame.size() - max_lag - 1;
  std::vector<double> diff(max_lag + 2, 0.0);
  for (std::size_t lag = 1; lag <= max_lag + 1; ++lag) {
    double acc = 0.0;
    for (std::size_t j = 0; j < span; ++j) {
      const double d = frame[j] - frame[j + lag];
      acc += d * d;
    }
    diff[lag] = acc;
  }

  // cumulative mean normalized difference
  std::vector<double> cmnd(diff.size(), 1.0);
  double running = 0.0;
  for (std::size_t lag = 1; lag < diff.size(); ++lag) {
    running += diff[lag];
    cmnd[lag] = running > 0.0 ? diff[lag] * static_cast<double>(lag) / running : 1.0;
  }

  std::size_t best = 0;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
    if (cmnd[lag] < cfg.threshold) {
      while (lag + 1 <= max_lag && cmnd[lag + 1] < cmnd[lag]) ++lag;
      best = lag;
      break;
    }
  }
  if (best == 0) return std::nullopt;

  double refined = static_cast<double>(best);
  if (best > 1 && best + 1 < cmnd.size()) {
    const double a = cmnd[best - 1], b = cmnd[best], c = cmnd[best + 1];
    const double denom = a - 2.0 * b + c;
    if (std::abs(denom) > 1e-12) refined += 0.5 * (a - c) / denom;
  }
  return sample_rate / refined;
}

std::vector<std::optional<double>> yin_track(const AudioSignal& x, std::size_t hop,
                                             std::size_t frames, const YinConfig& cfg) {
  auto length = static_cast<std::size_t>(std::lround(x.sample_rate * cfg.frame_ms / 1000.0));
  const auto min_length = 2 * static_cast<std::size_t>(std::ceil(x.sample_rate / cfg.f0_min));
  length = std::max(length, min_length);

  std::vector<std::optional<double>> track(frames);
  std::vector<double> frame(length);
  const auto total = static_cast<std::ptrdiff_t>(x.size());
  for (std::size_t t = 0; t < frames; ++t) {
    const auto start = static_cast<std::ptrdiff_t>(t * hop) - static_cast<std::ptrdiff_t>(length / 2);
    double e = 0.0;
    for (std::size_t k = 0; k < length; ++k) {
      const auto i = start + static_cast<std::ptrdiff_t>(k);
      frame[k] = (i >= 0 && i < total) ? x.samples[static_cast<std::size_t>(i)] : 0.0;
      e += frame[k] * frame[k];
    }
    if (e > 0.0) track[t] = yin_f0(frame, x.sample_rate, cfg);
  }
  return track;
}

}  // namespace morphsep
