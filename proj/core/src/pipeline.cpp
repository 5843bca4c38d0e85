#include "morphsep/pipeline.hpp"

#include <algorithm>

#include "morphsep/filters.hpp"
#include "morphsep/resample.hpp"

namespace morphsep {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::oracle: return "oracle";
    case Method::tv: return "tv";
    case Method::rpca: return "rpca";
    case Method::kam_hpss: return "kam-hpss";
    case Method::kam_repet: return "kam-repet";
    case Method::kam_cust: return "kam-cust";
  }
  return "oracle";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::oracle, Method::tv, Method::rpca, Method::kam_hpss, Method::kam_repet,
                   Method::kam_cust})
    if (to_string(m) == name) return m;
  throw Error("unknown separation method '" + std::string(name) + "'");
}

namespace {

Separation run_method(const AudioSignal& x, const SeparationOptions& opts, const StftConfig& grid) {
  switch (opts.method) {
    case Method::oracle: {
      if (opts.references.size() < 2) throw Error("oracle separation needs at least two references");
      std::vector<Stft> refs;
      std::vector<SourceRole> roles;
      for (const auto& r : opts.references) {
        if (r.signal.size() != x.size()) throw Error("reference length differs from the mixture");
        refs.push_back(stft(r.signal, grid));
        roles.push_back(r.role);
      }
      return synthesize(stft(x, grid), oracle_masks(refs, roles, opts.alpha));
    }
    case Method::tv:
      return tv_separate(x, opts.tv);
    case Method::rpca:
      return rpca_separate(x, opts.rpca, grid, opts.alpha);
    case Method::kam_hpss:
      return kam_hpss(stft(x, grid), opts.hpss_size, opts.hpss_size, opts.alpha, opts.kam.n_iter);
    case Method::kam_repet:
      return kam_repet_separate(stft(x, grid), opts.repet, opts.alpha, opts.kam.n_iter);
    case Method::kam_cust: {
      KamConfig cfg = opts.kam;
      cfg.alpha = opts.alpha;
      return kam_separate(stft(x, grid), cfg);
    }
  }
  throw Error("unsupported separation method");
}

SeparatedSource* find_mutable(Separation& sep, SourceRole role) {
  for (auto& s : sep)
    if (s.role == role) return &s;
  return nullptr;
}

void split_accompaniment(Separation& sep, const SeparationOptions& opts) {
  auto it = std::find_if(sep.begin(), sep.end(),
                         [](const SeparatedSource& s) { return s.role == SourceRole::accompaniment; });
  if (it == sep.end()) return;
  Separation parts = kam_hpss(it->stft, opts.hpss_size, opts.hpss_size, opts.alpha, opts.kam.n_iter);
  sep.erase(it);
  for (auto& p : parts) sep.push_back(std::move(p));
}

void refine_voice(Separation& sep, const SeparationOptions& opts) {
  SeparatedSource* voice = find_mutable(sep, SourceRole::voice);
  if (!voice) throw Error("F0 filtering needs a voice estimate");
  const auto& grid = voice->stft.config;
  // The voice STFT may live on a different grid than the output signal.
  const AudioSignal on_grid = istft(voice->stft);
  const auto track = yin_track(on_grid, grid.hop, static_cast<std::size_t>(voice->stft.frames()), opts.yin);
  auto [kept, rest] = f0_filter(voice->stft, track, opts.f0);

  SeparatedSource* sink = find_mutable(sep, SourceRole::harmonic);
  if (!sink) sink = find_mutable(sep, SourceRole::accompaniment);
  if (!sink) throw Error("F0 filtering needs a harmonic or accompaniment estimate");

  const std::size_t length = voice->signal.size();
  const double rate = voice->signal.sample_rate;
  auto to_output = [&](const Stft& s) {
    AudioSignal sig = resample(istft(s), rate);
    sig.samples.resize(length, 0.0);
    return sig;
  };
  if (sink->stft.bins() == rest.bins() && sink->stft.frames() == rest.frames()) {
    sink->stft.data += rest.data;
    sink->signal = to_output(sink->stft);
  } else {
    sink->signal = sink->signal + to_output(rest);
  }
  voice->stft = std::move(kept);
  voice->signal = to_output(voice->stft);
}

}  // namespace

Separation separate(const AudioSignal& x, const SeparationOptions& opts) {
  if (x.empty()) throw Error("cannot separate an empty signal");
  StftConfig grid = opts.stft;
  grid.sample_rate = x.sample_rate;

  Separation sep = run_method(x, opts, grid);
  if (opts.hpss) split_accompaniment(sep, opts);
  if (opts.f0_filter) refine_voice(sep, opts);
  return sep;
}

DetectionLattice detect_pipeline(const AudioSignal& x, const DetectionOptions& opts) {
  opts.vad.validate();
  const Separation sep = separate(x, opts.separation);
  const SeparatedSource* voice = find_role(sep, SourceRole::voice);
  if (!voice) throw Error("the chosen separation produced no voice estimate");

  const AudioSignal mix_band = bandpass(x, opts.vad.band_low_hz, opts.vad.band_high_hz);
  const AudioSignal voice_band = bandpass(voice->signal, opts.vad.band_low_hz, opts.vad.band_high_hz);
  return detect_voice(vtmr(mix_band, voice_band, opts.vad), opts.vad.voice_threshold);
}

}  // namespace morphsep
