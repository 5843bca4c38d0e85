#pragma once

#include "morphsep/audio.hpp"

namespace morphsep {

struct ResampleOptions {
  /// Half filter length, in zero crossings of the lower-rate sinc.
  int zero_crossings = 96;
  /// Kaiser window shape parameter.
  double kaiser_beta = 8.6;
  /// Low-pass cutoff as a fraction of the lower of the two rates.
  double cutoff = 0.475;
};

/// Kaiser-windowed sinc sample-rate conversion by the rational ratio
/// target/source (both rounded to integer Hz). Output length is
/// round(size * target / source); equal rates return the input unchanged.
AudioSignal resample(const AudioSignal& x, double target_rate,
                     const ResampleOptions& opts = {});

}  // namespace morphsep
