#pragma once

#include <vector>

#include "morphsep/audio.hpp"

namespace morphsep {

/// Direct-form II transposed second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

/// Cascade of biquads applied causally from zero initial state.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  void append(const SosFilter& other);
  const std::vector<Biquad>& sections() const { return sections_; }

  std::vector<double> apply(const std::vector<double>& x) const;
  /// Magnitude response at `freq_hz` for sample rate `rate`.
  double gain_at(double freq_hz, double rate) const;

 private:
  std::vector<Biquad> sections_;
};

/// Butterworth designs via the bilinear transform; `order` must be even.
SosFilter butterworth_lowpass(int order, double cutoff_hz, double rate);
SosFilter butterworth_highpass(int order, double cutoff_hz, double rate);

/// Band-pass used before the voice/music ratio: 8th-order high-pass at `low`
/// cascaded with an 8th-order low-pass at `high`. At least 40 dB down one
/// octave outside each edge.
SosFilter bandpass_design(double low_hz, double high_hz, double rate);
AudioSignal bandpass(const AudioSignal& x, double low_hz, double high_hz);

AudioSignal highpass(const AudioSignal& x, double cutoff_hz, int order = 4);

}  // namespace morphsep
