#pragma once

#include <optional>
#include <span>
#include <vector>

#include "morphsep/audio.hpp"

namespace morphsep {

struct YinConfig {
  double threshold = 0.1;
  double f0_min = 80.0;
  double f0_max = 1000.0;
  double frame_ms = 46.0;
};

/// Fundamental frequency of one frame in Hz, or nullopt when no dip of the
/// cumulative-mean-normalized difference falls below the threshold.
/// The frame must hold at least two periods of f0_min.
std::optional<double> yin_f0(std::span<const double> frame, double sample_rate,
                             const YinConfig& cfg = {});

/// F0 at each STFT frame center (frame t centered on sample t * hop);
/// nullopt for unvoiced frames.
std::vector<std::optional<double>> yin_track(const AudioSignal& x, std::size_t hop,
                                             std::size_t frames, const YinConfig& cfg = {});

}  // namespace morphsep
