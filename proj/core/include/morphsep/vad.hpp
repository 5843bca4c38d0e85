#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "morphsep/audio.hpp"
#include "morphsep/stft.hpp"

namespace morphsep {

struct VadConfig {
  std::size_t frame_length = 8192;  // about 371.5 ms at 22050 Hz
  std::size_t step = 662;           // about 30 ms at 22050 Hz
  double silence_threshold = 1e-4;
  double voice_threshold = 0.5;
  double band_low_hz = 120.0;
  double band_high_hz = 3000.0;

  void validate() const;
  /// Frame and step given in milliseconds at `rate`.
  static VadConfig from_ms(double rate, double frame_ms = 8192.0 / 22.05, double step_ms = 30.0);
};

struct DetectionFrame {
  double center_time = 0.0;  // seconds
  double energy = 0.0;       // mixture energy over the frame
  double vtmr = 0.0;         // voice-to-mixture energy ratio, in [0, 1]
  bool decision = false;
  std::optional<bool> truth;
};

struct DetectionLattice {
  std::vector<DetectionFrame> frames;

  std::size_t size() const { return frames.size(); }
  std::vector<bool> decisions() const;
};

/// Number of analysis frames: floor((length - frame) / step) + 1, or 0 when
/// the signal is shorter than one frame.
std::size_t lattice_size(std::size_t length, const VadConfig& cfg);

/// Per-frame mixture energy and voice-to-mixture ratio. Frames whose energy
/// does not exceed the silence threshold get ratio 0; others are clamped to
/// [0, 1].
DetectionLattice vtmr(const AudioSignal& mixture, const AudioSignal& voice, const VadConfig& cfg);

/// decision = vtmr > threshold (strict).
DetectionLattice detect_voice(DetectionLattice lattice, double threshold);

struct F0FilterOptions {
  /// Bins kept on each side of a selected partial peak.
  int lobe_halfwidth = 1;
};

/// Binary harmonic mask: for each voiced frame and each multiple k * f0
/// below Nyquist, the local magnitude maximum nearest k * f0 within half a
/// harmonic spacing is kept (with its lobe). Unvoiced frames keep nothing.
RealMatrix f0_mask(const Stft& voice, const std::vector<std::optional<double>>& f0_track,
                   const F0FilterOptions& opts = {});

/// (refined voice, residual) with refined + residual == voice exactly.
std::pair<Stft, Stft> f0_filter(const Stft& voice,
                                const std::vector<std::optional<double>>& f0_track,
                                const F0FilterOptions& opts = {});

}  // namespace morphsep
