#pragma once

#include <functional>

#include "morphsep/audio.hpp"
#include "morphsep/masking.hpp"

namespace morphsep {

/// Which constant increments the two clamped averaging updates use.
enum class TvIncrements {
  /// Stationary point of the total-variation objective: the harmonic mask
  /// steps by lambda2 / 2 and the percussive mask by lambda2 / (2 lambda1).
  stationary,
  /// lambda1 / 2 and lambda1 / (2 lambda2). With the default weights this
  /// pushes nearly all energy into the percussive mask.
  as_written,
};

struct TvConfig {
  double lambda1 = 0.25;
  double lambda2 = 0.025;
  double gamma = 0.25;
  int n_iter = 200;
  double highpass_hz = 120.0;
  double target_rate = 16000.0;
  double frame_ms = 64.0;
  TvIncrements increments = TvIncrements::stationary;

  void validate() const;
  double harmonic_step() const;
  double percussive_step() const;
};

/// Called after each full iteration with the current harmonic and
/// percussive masks.
using TvObserver = std::function<void(int iteration, const RealMatrix& harmonic,
                                      const RealMatrix& percussive)>;

/// Three-way decomposition W = M_v + M_h + M_p of a compressed spectrogram.
/// Masks are returned in the order voice, harmonic, percussive, with
/// alpha = 1 / (2 gamma).
MaskSet tv_masks(const RealMatrix& compressed, const TvConfig& cfg,
                 const TvObserver& observer = {});

/// Resample to cfg.target_rate, high-pass, decompose and Wiener-filter.
/// Output signals are returned at the input sample rate; their STFTs are on
/// the internal analysis grid.
Separation tv_separate(const AudioSignal& x, const TvConfig& cfg = {});

}  // namespace morphsep
