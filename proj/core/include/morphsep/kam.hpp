#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "morphsep/audio.hpp"
#include "morphsep/masking.hpp"
#include "morphsep/stft.hpp"

namespace morphsep {

/// Neighbourhood stencil over a (frequency x time) grid: `values` is
/// h rows (frequency) by w columns (time), both odd, centered.
struct Kernel {
  RealMatrix values;
  SourceRole label = SourceRole::other;
  bool binary = true;
  /// Threshold used to binarize a trained kernel, when known.
  std::optional<double> threshold;

  Eigen::Index h() const { return values.rows(); }
  Eigen::Index w() const { return values.cols(); }
  /// Throws Error on even dimensions, non-0/1 binary entries or an empty
  /// binary kernel.
  void validate() const;
};

Kernel kernel_harmonic(int w, SourceRole label = SourceRole::harmonic);
Kernel kernel_percussive(int h, SourceRole label = SourceRole::percussive);
/// 1 x (period * (count - 1) + 1) row with taps every `period` frames,
/// centered. `count` must be odd.
Kernel kernel_repet(int period, int count, SourceRole label = SourceRole::accompaniment);
Kernel kernel_cross(int h, int w, SourceRole label = SourceRole::voice);

/// Tap offsets (frequency, time) of a binary kernel, relative to its center.
struct TapOffset {
  int df;
  int dt;
};
std::vector<TapOffset> kernel_taps(const Kernel& k);

/// Median of m over the kernel's taps centered on (f, t). Taps falling off
/// the grid are dropped; an even population averages its two middle values;
/// an empty population yields 0.
double median_neighborhood(const RealMatrix& m, const Kernel& k, Eigen::Index f, Eigen::Index t);

/// median_neighborhood at every point of m.
RealMatrix median_filter(const RealMatrix& m, const Kernel& k);

enum class KamUpdate {
  /// Points visited frame by frame; each Wiener update is visible to the
  /// medians of later points in the same sweep.
  in_place,
  /// All medians computed from the previous iteration's estimates.
  jacobi,
};

struct KamConfig {
  std::vector<Kernel> kernels;
  double alpha = 2.0;
  int n_iter = 4;
  KamUpdate update = KamUpdate::in_place;

  void validate() const;
};

/// Called after every iteration with the per-source Wiener gains.
using KamObserver = std::function<void(int iteration, const std::vector<RealMatrix>& gains)>;

/// Per-source Wiener gains after cfg.n_iter iterations, starting from X / I.
std::vector<RealMatrix> kam_gains(const Stft& mixture, const KamConfig& cfg,
                                  const KamObserver& observer = {});

Separation kam_separate(const Stft& mixture, const KamConfig& cfg,
                        const KamObserver& observer = {});

/// Harmonic/percussive split with a 1 x w row and an h x 1 column kernel.
Separation kam_hpss(const Stft& mixture, int h = 17, int w = 17, double alpha = 2.0,
                    int n_iter = 4);

/// Trained real-valued kernel: power-weighted average of the
/// Frobenius-normalized h x w magnitude patches around every interior point.
Kernel train_kernel(const Stft& source, int h, int w, SourceRole label = SourceRole::other);

enum class ThresholdScale {
  absolute,
  /// Threshold as a fraction of the kernel's largest value.
  peak,
};

/// 1 where the trained value exceeds the threshold (strictly). The returned
/// kernel records the absolute threshold that was applied.
Kernel binarize_kernel(const Kernel& trained, double threshold,
                       ThresholdScale scale = ThresholdScale::absolute);

struct RepetOptions {
  /// Repetition period in frames; estimated from the beat spectrum if unset.
  std::optional<int> period_frames;
  int count = 5;
  /// Size of the cross-shaped voice kernel.
  int voice_size = 3;
  double min_period_s = 0.2;
  double max_period_s = 8.0;
};

/// Lag (in frames) of the strongest repetition in the mean autocorrelation
/// of the spectrogram rows, searched over [min_lag, max_lag].
int estimate_repetition_period(const RealMatrix& power, int min_lag, int max_lag);

/// Voice / accompaniment separation with a repetition kernel for the
/// accompaniment and a cross kernel for the voice.
Separation kam_repet_separate(const Stft& mixture, const RepetOptions& opts = {},
                              double alpha = 2.0, int n_iter = 4);

}  // namespace morphsep
