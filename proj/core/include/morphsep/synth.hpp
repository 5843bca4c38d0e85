#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "morphsep/audio.hpp"
#include "morphsep/formats.hpp"

namespace morphsep {

// Deterministic test scenes. The same recipe and seed always produce the
// same samples, and the mixture is the sample-wise sum of the components.

enum class Component { drone, partials, vibrato, clicks, chord_loop };

std::string_view to_string(Component c);
Component component_from_string(std::string_view name);
/// Comma-separated component names, e.g. "vibrato,drone,clicks".
std::vector<Component> parse_recipe(std::string_view text);
SourceRole role_of(Component c);

struct SceneOptions {
  std::vector<Component> recipe{Component::vibrato, Component::drone, Component::clicks};
  double sample_rate = 22050.0;
  double duration = 30.0;
  std::uint64_t seed = 3;

  // vibrato voice: slowly drifting f0 with vibrato, gated by voice_segments
  double voice_f0 = 300.0;
  double voice_amp = 0.15;
  int voice_partials = 5;
  double drift_depth = 40.0;
  double drift_hz = 0.1;
  double vibrato_depth = 8.0;
  double vibrato_hz = 5.5;
  std::vector<Segment> voice_segments{{2, 6}, {9, 14}, {17, 20}, {23, 28}};

  double drone_hz = 110.0;
  double drone_amp = 0.08;
  int drone_partials = 7;

  // steady stack with random partial amplitudes
  double stack_hz = 165.0;
  double stack_amp = 0.04;
  int stack_partials = 10;

  double chord_seconds = 0.5;
  double chord_amp = 0.08;

  // decaying noise bursts
  double click_period = 0.5;
  double click_amp = 0.5;
  double click_decay = 40.0;  // samples
  int click_length = 300;     // samples
};

struct SceneSource {
  Component component;
  AudioSignal signal;
};

struct Scene {
  AudioSignal mixture;
  std::vector<SceneSource> sources;
  /// Voice-active spans; empty unless the recipe has a vibrato voice.
  std::vector<Segment> voice_segments;

  /// Sum of the components with the given role, zeros when there are none.
  AudioSignal sum_of(SourceRole role) const;
  AudioSignal voice() const { return sum_of(SourceRole::voice); }
  /// Everything except the voice.
  AudioSignal accompaniment() const;
};

Scene make_scene(const SceneOptions& opts);

/// Harmonic tone (fundamental plus two partials) and periodic clicks, the
/// basic harmonic/percussive test signal. Returns {tone, clicks}.
std::pair<AudioSignal, AudioSignal> tone_and_clicks(double sample_rate, double duration,
                                                    double tone_hz = 440.0, double tone_amp = 0.1,
                                                    double click_period = 0.25, std::uint64_t seed = 1);

}  // namespace morphsep
