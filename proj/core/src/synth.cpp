#include "morphsep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace morphsep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr std::pair<Component, std::string_view> kNames[] = {
    {Component::drone, "drone"},   {Component::partials, "partials"},
    {Component::vibrato, "vibrato"}, {Component::clicks, "clicks"},
    {Component::chord_loop, "chord_loop"}};

std::vector<double> bursts(std::size_t n, double rate, double period, double amp, double decay,
                           int length, std::mt19937_64& rng) {
  std::vector<double> out(n, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto step = static_cast<std::size_t>(std::llround(period * rate));
  if (step == 0) throw Error("click period is shorter than one sample");
  for (std::size_t start = 0; start < n; start += step)
    for (int k = 0; k < length && start + static_cast<std::size_t>(k) < n; ++k)
      out[start + static_cast<std::size_t>(k)] += amp * normal(rng) * std::exp(-k / decay);
  return out;
}

std::vector<double> vibrato(std::size_t n, const SceneOptions& o) {
  std::vector<double> out(n, 0.0);
  const double fs = o.sample_rate;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 = o.voice_f0 + o.drift_depth * std::sin(kTwoPi * o.drift_hz * t) +
                      o.vibrato_depth * std::sin(kTwoPi * o.vibrato_hz * t);
    phase += kTwoPi * f0 / fs;
    const bool on = std::any_of(o.voice_segments.begin(), o.voice_segments.end(),
                                [t](const Segment& s) { return t >= s.start && t < s.end; });
    if (!on) continue;
    for (int k = 1; k <= o.voice_partials; ++k) out[i] += o.voice_amp / k * std::sin(k * phase);
  }
  return out;
}

std::vector<double> stack(std::size_t n, double fs, double f0, int partials,
                          const std::vector<double>& amps) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    for (int k = 1; k <= partials; ++k) out[i] += amps[k - 1] * std::sin(kTwoPi * f0 * k * t);
  }
  return out;
}

std::vector<double> chords(std::size_t n, const SceneOptions& o) {
  // I-vi-IV-V, ratios to the tonic
  static constexpr double kChords[4][3] = {
      {1.0, 1.25, 1.5}, {5.0 / 6, 1.0, 1.25}, {2.0 / 3, 5.0 / 6, 1.0}, {0.75, 0.9375, 1.125}};
  const double fs = o.sample_rate;
  const auto len = static_cast<std::size_t>(std::llround(o.chord_seconds * fs));
  if (len == 0) throw Error("chord duration is shorter than one sample");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t chord = (i / len) % 4;
    const double local = static_cast<double>(i % len) / fs;
    const double env = std::exp(-3.0 * local);
    for (double r : kChords[chord])
      for (int k = 1; k <= 3; ++k)
        out[i] += env * o.chord_amp / k * std::sin(kTwoPi * 2.0 * o.drone_hz * r * k * local);
  }
  return out;
}

}  // namespace

std::string_view to_string(Component c) {
  for (const auto& [comp, name] : kNames)
    if (comp == c) return name;
  return "unknown";
}

Component component_from_string(std::string_view name) {
  for (const auto& [comp, n] : kNames)
    if (n == name) return comp;
  throw Error("unknown recipe component '" + std::string(name) +
              "' (expected drone, partials, vibrato, clicks or chord_loop)");
}

std::vector<Component> parse_recipe(std::string_view text) {
  std::vector<Component> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const auto name = text.substr(pos, end - pos);
    if (!name.empty()) out.push_back(component_from_string(name));
    pos = end + 1;
  }
  if (out.empty()) throw Error("empty recipe");
  return out;
}

SourceRole role_of(Component c) {
  switch (c) {
    case Component::vibrato: return SourceRole::voice;
    case Component::clicks: return SourceRole::percussive;
    default: return SourceRole::harmonic;
  }
}

AudioSignal Scene::sum_of(SourceRole role) const {
  AudioSignal out{std::vector<double>(mixture.size(), 0.0), mixture.sample_rate};
  for (const auto& s : sources)
    if (role_of(s.component) == role) out = out + s.signal;
  return out;
}

AudioSignal Scene::accompaniment() const {
  AudioSignal out{std::vector<double>(mixture.size(), 0.0), mixture.sample_rate};
  for (const auto& s : sources)
    if (role_of(s.component) != SourceRole::voice) out = out + s.signal;
  return out;
}

Scene make_scene(const SceneOptions& o) {
  if (o.recipe.empty()) throw Error("empty recipe");
  if (o.sample_rate <= 0 || o.duration <= 0) throw Error("scene needs a positive rate and duration");
  const auto n = static_cast<std::size_t>(std::llround(o.duration * o.sample_rate));
  const double fs = o.sample_rate;
  std::mt19937_64 rng(o.seed);

  Scene scene;
  for (Component c : o.recipe) {
    std::vector<double> x;
    switch (c) {
      case Component::vibrato:
        x = vibrato(n, o);
        scene.voice_segments = o.voice_segments;
        break;
      case Component::drone: {
        std::vector<double> amps;
        for (int k = 1; k <= o.drone_partials; ++k) amps.push_back(o.drone_amp / k);
        x = stack(n, fs, o.drone_hz, o.drone_partials, amps);
        break;
      }
      case Component::partials: {
        std::uniform_real_distribution<double> u(0.2, 1.0);
        std::vector<double> amps;
        for (int k = 1; k <= o.stack_partials; ++k) amps.push_back(o.stack_amp * u(rng));
        x = stack(n, fs, o.stack_hz, o.stack_partials, amps);
        break;
      }
      case Component::chord_loop: x = chords(n, o); break;
      case Component::clicks:
        x = bursts(n, fs, o.click_period, o.click_amp, o.click_decay, o.click_length, rng);
        break;
    }
    scene.sources.push_back({c, {std::move(x), fs}});
  }

  scene.mixture = {std::vector<double>(n, 0.0), fs};
  for (const auto& s : scene.sources)
    for (std::size_t i = 0; i < n; ++i) scene.mixture.samples[i] += s.signal.samples[i];
  return scene;
}

std::pair<AudioSignal, AudioSignal> tone_and_clicks(double fs, double duration, double tone_hz,
                                                    double tone_amp, double click_period,
                                                    std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  AudioSignal tone{std::vector<double>(n), fs};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    tone.samples[i] = tone_amp * (std::sin(kTwoPi * tone_hz * t) + 0.5 * std::sin(kTwoPi * 2 * tone_hz * t) +
                                  0.25 * std::sin(kTwoPi * 3 * tone_hz * t));
  }
  std::mt19937_64 rng(seed);
  AudioSignal clicks{bursts(n, fs, click_period, 0.5, 20.0, 200, rng), fs};
  return {std::move(tone), std::move(clicks)};
}

}  // namespace morphsep
