#include "morphsep/tv.hpp"

#include <algorithm>

#include "morphsep/filters.hpp"
#include "morphsep/resample.hpp"

namespace morphsep {

void TvConfig::validate() const {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw Error("TV weights must be positive");
  if (!(gamma > 0.0) || gamma > 1.0) throw Error("TV compression exponent must lie in (0, 1]");
  if (n_iter < 1) throw Error("TV needs at least one iteration");
}

double TvConfig::harmonic_step() const {
  return increments == TvIncrements::stationary ? lambda2 / 2.0 : lambda1 / 2.0;
}

double TvConfig::percussive_step() const {
  return increments == TvIncrements::stationary ? lambda2 / (2.0 * lambda1)
                                                : lambda1 / (2.0 * lambda2);
}

MaskSet tv_masks(const RealMatrix& w, const TvConfig& cfg, const TvObserver& observer) {
  cfg.validate();
  if (!w.allFinite()) throw Error("spectrogram has non-finite entries");
  if ((w.array() < 0.0).any()) throw Error("spectrogram has negative entries");

  const Eigen::Index bins = w.rows();
  const Eigen::Index frames = w.cols();
  const double step_h = cfg.harmonic_step();
  const double step_p = cfg.percussive_step();
  RealMatrix harm = RealMatrix::Zero(bins, frames);
  RealMatrix perc = RealMatrix::Zero(bins, frames);

  // Gauss-Seidel sweeps in increasing frame, then bin, order. Neighbours
  // outside the matrix read as zero.
  for (int it = 0; it < cfg.n_iter; ++it) {
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (Eigen::Index f = 0; f < bins; ++f) {
        const double prev = t > 0 ? harm(f, t - 1) : 0.0;
        const double next = t + 1 < frames ? harm(f, t + 1) : 0.0;
        const double v = std::min(0.5 * (prev + next) + step_h, w(f, t) - perc(f, t));
        harm(f, t) = std::max(v, 0.0);
      }
    }
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (Eigen::Index f = 0; f < bins; ++f) {
        const double prev = f > 0 ? perc(f - 1, t) : 0.0;
        const double next = f + 1 < bins ? perc(f + 1, t) : 0.0;
        const double v = std::min(0.5 * (prev + next) + step_p, w(f, t) - harm(f, t));
        perc(f, t) = std::max(v, 0.0);
      }
    }
    if (observer) observer(it + 1, harm, perc);
  }

  RealMatrix voice = (w - harm - perc).cwiseMax(0.0);
  MaskSet set;
  set.alpha = 1.0 / (2.0 * cfg.gamma);
  set.masks.push_back({SourceRole::voice, std::move(voice)});
  set.masks.push_back({SourceRole::harmonic, std::move(harm)});
  set.masks.push_back({SourceRole::percussive, std::move(perc)});
  return set;
}

Separation tv_separate(const AudioSignal& x, const TvConfig& cfg) {
  cfg.validate();
  if (x.empty()) throw Error("cannot separate an empty signal");
  const AudioSignal low = resample(x, cfg.target_rate);
  const AudioSignal filtered = highpass(low, cfg.highpass_hz);
  const StftConfig stft_cfg = StftConfig::from_duration(low.sample_rate, cfg.frame_ms);
  const Stft mix = stft(filtered, stft_cfg);

  Separation sep = synthesize(mix, tv_masks(spectrogram(mix, cfg.gamma), cfg));
  for (auto& s : sep) {
    s.signal = resample(s.signal, x.sample_rate);
    s.signal.samples.resize(x.size(), 0.0);
  }
  return sep;
}

}  // namespace morphsep
