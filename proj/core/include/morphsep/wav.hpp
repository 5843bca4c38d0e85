#pragma once

#include <filesystem>
#include <vector>

#include "morphsep/audio.hpp"

namespace morphsep {

enum class SampleFormat { pcm16, pcm24, pcm32, float32, float64 };

struct WavInfo {
  int channels = 0;
  double sample_rate = 0.0;
  SampleFormat format = SampleFormat::pcm16;
  std::size_t frames = 0;
};

/// Reads a RIFF/WAVE file and returns its channel average, scaled to
/// [-1, 1] (integer PCM divided by 2^(bits-1)).
AudioSignal load_wav(const std::filesystem::path& path, WavInfo* info = nullptr);

/// Per-channel samples, without averaging.
std::vector<std::vector<double>> load_wav_channels(const std::filesystem::path& path,
                                                   WavInfo* info = nullptr);

std::vector<char> encode_wav(const std::vector<std::vector<double>>& channels, double sample_rate,
                             SampleFormat format);

/// Writes atomically: the file appears under `path` only once complete.
/// Integer formats clip to full scale.
void write_wav(const std::filesystem::path& path, const AudioSignal& x,
               SampleFormat format = SampleFormat::float32);
void write_wav(const std::filesystem::path& path, const std::vector<std::vector<double>>& channels,
               double sample_rate, SampleFormat format = SampleFormat::float32);

}  // namespace morphsep
