#pragma once

#include <optional>
#include <vector>

#include "morphsep/audio.hpp"

namespace morphsep {

/// Ratios are reported in dB and clamped to +/- kSentinelDb, which also
/// stands in for division by zero.
inline constexpr double kSentinelDb = 200.0;

double ratio_db(double numerator, double denominator);

/// 10 log10(||s||^2 / ||s - s_hat||^2).
double rqf(const AudioSignal& reference, const AudioSignal& estimate);

/// Orthogonal split of an estimate against a set of references.
struct BssDecomposition {
  std::vector<double> target;        // projection on the target reference
  std::vector<double> interference;  // rest of the projection on all references
  std::vector<double> artifact;      // remainder
};

struct BssScore {
  double sdr_db = 0.0;
  double sir_db = 0.0;
  double sar_db = 0.0;
};

struct SeparationScore {
  double rqf_db = 0.0;
  double sdr_db = 0.0;
  double sir_db = 0.0;
  double sar_db = 0.0;
};

BssDecomposition bss_decompose(const AudioSignal& estimate, const std::vector<AudioSignal>& references,
                               std::size_t target);
BssScore bss_eval(const AudioSignal& estimate, const std::vector<AudioSignal>& references,
                  std::size_t target);

/// RQF plus BSS scores of estimates[i] against references[i].
std::vector<SeparationScore> score_separation(const std::vector<AudioSignal>& estimates,
                                              const std::vector<AudioSignal>& references);

struct ClassScore {
  std::optional<double> recall;
  std::optional<double> precision;
};

struct DetectionScore {
  double av_rec = 0.0;
  double av_prec = 0.0;
  double f_meas = 0.0;
  ClassScore voice;
  ClassScore music;
};

/// Harmonic mean of recall and precision; 0 when both are 0.
double f_measure(double recall, double precision);

/// Two-class (voice / music) frame scoring. A class missing from the truth
/// scores recall 1 when it is also never predicted; otherwise its recall is
/// undefined and left out of the average. Precision is treated the same way
/// with the roles of truth and prediction swapped.
DetectionScore detection_metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth);

}  // namespace morphsep
