#pragma once

#include <cstddef>

#include "morphsep/audio.hpp"

namespace morphsep {

enum class WindowType { hann };

struct StftConfig {
  std::size_t window_length = 2048;
  std::size_t hop = 512;
  WindowType window = WindowType::hann;
  double sample_rate = 22050.0;

  std::size_t bins() const { return window_length / 2 + 1; }

  /// Throws Error unless window_length is even and positive and
  /// 0 < hop <= window_length.
  void validate() const;

  /// Hann window of `window_ms` milliseconds at `rate`, with 3/4 overlap.
  static StftConfig from_duration(double rate, double window_ms);
};

/// One-sided STFT: data is bins x frames (F x T). Frame t is centered on
/// sample t * hop; the signal is zero-padded by half a window on each side.
struct Stft {
  ComplexMatrix data;
  StftConfig config;
  std::size_t original_length = 0;

  Eigen::Index bins() const { return data.rows(); }
  Eigen::Index frames() const { return data.cols(); }

  /// Same configuration and length, different coefficients.
  Stft with_data(ComplexMatrix d) const { return Stft{std::move(d), config, original_length}; }
};

std::vector<double> make_window(WindowType type, std::size_t length);

/// Number of frames produced for a signal of `length` samples.
std::size_t frame_count(std::size_t length, std::size_t hop);

Stft stft(const AudioSignal& x, const StftConfig& cfg);

/// Weighted overlap-add with dual-window normalization; returns exactly
/// original_length samples.
AudioSignal istft(const Stft& s);

/// Element-wise |X|^(2 gamma); gamma = 1 is the power spectrogram.
RealMatrix spectrogram(const Stft& s, double gamma = 1.0);
RealMatrix magnitude(const Stft& s);

}  // namespace morphsep
