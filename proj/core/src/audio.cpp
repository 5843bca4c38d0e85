#include "morphsep/audio.hpp"

#include <algorithm>
#include <numeric>

namespace morphsep {

std::string_view to_string(SourceRole role) {
  switch (role) {
    case SourceRole::voice: return "voice";
    case SourceRole::harmonic: return "harmonic";
    case SourceRole::percussive: return "percussive";
    case SourceRole::accompaniment: return "accompaniment";
    case SourceRole::other: return "other";
  }
  return "other";
}

SourceRole role_from_string(std::string_view name) {
  if (name == "voice") return SourceRole::voice;
  if (name == "harmonic") return SourceRole::harmonic;
  if (name == "percussive") return SourceRole::percussive;
  if (name == "accompaniment") return SourceRole::accompaniment;
  if (name == "other") return SourceRole::other;
  throw Error("unknown source role '" + std::string(name) + "'");
}

double energy(const std::vector<double>& x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double energy(const AudioSignal& x) { return energy(x.samples); }

AudioSignal operator+(const AudioSignal& a, const AudioSignal& b) {
  if (a.size() != b.size()) throw Error("signal length mismatch in sum");
  AudioSignal out(a.samples, a.sample_rate);
  std::transform(out.samples.begin(), out.samples.end(), b.samples.begin(),
                 out.samples.begin(), std::plus<>());
  return out;
}

AudioSignal scaled(const AudioSignal& x, double gain) {
  AudioSignal out(x.samples, x.sample_rate);
  for (auto& v : out.samples) v *= gain;
  return out;
}

}  // namespace morphsep
