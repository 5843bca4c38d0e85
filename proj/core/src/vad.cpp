#include "morphsep/vad.hpp"

#include <algorithm>
#include <cmath>

namespace morphsep {

void VadConfig::validate() const {
  if (frame_length == 0 || step == 0) throw Error("detection frame and step must be positive");
  if (!(silence_threshold > 0.0)) throw Error("silence threshold must be positive");
  if (!(voice_threshold >= 0.0 && voice_threshold <= 1.0))
    throw Error("voice threshold must lie in [0, 1]");
  if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz))
    throw Error("band edges must satisfy 0 < low < high");
}

VadConfig VadConfig::from_ms(double rate, double frame_ms, double step_ms) {
  VadConfig cfg;
  cfg.frame_length = static_cast<std::size_t>(std::lround(rate * frame_ms / 1000.0));
  cfg.step = static_cast<std::size_t>(std::lround(rate * step_ms / 1000.0));
  return cfg;
}

std::vector<bool> DetectionLattice::decisions() const {
  std::vector<bool> out(frames.size());
  std::transform(frames.begin(), frames.end(), out.begin(),
                 [](const DetectionFrame& f) { return f.decision; });
  return out;
}

std::size_t lattice_size(std::size_t length, const VadConfig& cfg) {
  if (length < cfg.frame_length) return 0;
  return (length - cfg.frame_length) / cfg.step + 1;
}

DetectionLattice vtmr(const AudioSignal& mixture, const AudioSignal& voice, const VadConfig& cfg) {
  cfg.validate();
  if (mixture.size() != voice.size()) throw Error("mixture and voice estimate differ in length");
  if (mixture.sample_rate != voice.sample_rate)
    throw Error("mixture and voice estimate differ in sample rate");

  // prefix sums of squared samples
  const std::size_t n = mixture.size();
  std::vector<double> cum_x(n + 1, 0.0), cum_v(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cum_x[i + 1] = cum_x[i] + mixture.samples[i] * mixture.samples[i];
    cum_v[i + 1] = cum_v[i] + voice.samples[i] * voice.samples[i];
  }

  DetectionLattice lattice;
  const std::size_t count = lattice_size(n, cfg);
  lattice.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * cfg.step;
    const std::size_t end = start + cfg.frame_length;
    DetectionFrame fr;
    fr.center_time = (static_cast<double>(start) + 0.5 * static_cast<double>(cfg.frame_length)) /
                     mixture.sample_rate;
    fr.energy = std::max(0.0, cum_x[end] - cum_x[start]);
    if (fr.energy > cfg.silence_threshold) {
      const double ve = std::max(0.0, cum_v[end] - cum_v[start]);
      fr.vtmr = std::clamp(ve / fr.energy, 0.0, 1.0);
    }
    lattice.frames.push_back(fr);
  }
  return lattice;
}

DetectionLattice detect_voice(DetectionLattice lattice, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("voice threshold must lie in [0, 1]");
  for (auto& f : lattice.frames) f.decision = f.vtmr > threshold;
  return lattice;
}

RealMatrix f0_mask(const Stft& voice, const std::vector<std::optional<double>>& f0_track,
                   const F0FilterOptions& opts) {
  const Eigen::Index bins = voice.bins();
  const Eigen::Index frames = voice.frames();
  if (static_cast<Eigen::Index>(f0_track.size()) != frames)
    throw Error("F0 track length does not match the number of STFT frames");

  const double bin_hz = voice.config.sample_rate / static_cast<double>(voice.config.window_length);
  const double nyquist = voice.config.sample_rate / 2.0;
  const RealMatrix mag = magnitude(voice);
  RealMatrix mask = RealMatrix::Zero(bins, frames);

  auto is_peak = [&](Eigen::Index b, Eigen::Index t) {
    const double v = mag(b, t);
    if (v <= 0.0) return false;
    const double left = b > 0 ? mag(b - 1, t) : 0.0;
    const double right = b + 1 < bins ? mag(b + 1, t) : 0.0;
    return v >= left && v >= right && (v > left || v > right);
  };

  for (Eigen::Index t = 0; t < frames; ++t) {
    const auto& f0 = f0_track[static_cast<std::size_t>(t)];
    if (!f0 || !(*f0 > 0.0)) continue;
    const double spacing = *f0 / bin_hz;  // in bins
    for (int k = 1; k * *f0 < nyquist; ++k) {
      const double center = k * spacing;
      const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(center - spacing / 2)));
      const auto hi = std::min<Eigen::Index>(bins - 1, static_cast<Eigen::Index>(std::floor(center + spacing / 2)));
      Eigen::Index best = -1;
      for (Eigen::Index b = lo; b <= hi; ++b) {
        if (!is_peak(b, t)) continue;
        if (best < 0) {
          best = b;
          continue;
        }
        const double d = std::abs(static_cast<double>(b) - center);
        const double db = std::abs(static_cast<double>(best) - center);
        if (d < db || (d == db && mag(b, t) > mag(best, t))) best = b;
      }
      if (best < 0) continue;
      const auto first = std::max<Eigen::Index>(0, best - opts.lobe_halfwidth);
      const auto last = std::min<Eigen::Index>(bins - 1, best + opts.lobe_halfwidth);
      for (Eigen::Index b = first; b <= last; ++b) mask(b, t) = 1.0;
    }
  }
  return mask;
}

std::pair<Stft, Stft> f0_filter(const Stft& voice, const std::vector<std::optional<double>>& f0_track,
                                const F0FilterOptions& opts) {
  const RealMatrix mask = f0_mask(voice, f0_track, opts);
  ComplexMatrix kept = ComplexMatrix::Zero(voice.bins(), voice.frames());
  ComplexMatrix rest = ComplexMatrix::Zero(voice.bins(), voice.frames());
  for (Eigen::Index t = 0; t < voice.frames(); ++t)
    for (Eigen::Index b = 0; b < voice.bins(); ++b)
      (mask(b, t) != 0.0 ? kept : rest)(b, t) = voice.data(b, t);
  return {voice.with_data(std::move(kept)), voice.with_data(std::move(rest))};
}

}  // namespace morphsep
