#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "morphsep/audio.hpp"
#include "morphsep/kam.hpp"
#include "morphsep/masking.hpp"
#include "morphsep/rpca.hpp"
#include "morphsep/stft.hpp"
#include "morphsep/tv.hpp"
#include "morphsep/vad.hpp"
#include "morphsep/yin.hpp"

namespace morphsep {

enum class Method { oracle, tv, rpca, kam_hpss, kam_repet, kam_cust };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct Reference {
  SourceRole role = SourceRole::other;
  AudioSignal signal;
};

struct SeparationOptions {
  Method method = Method::kam_repet;
  double alpha = 2.0;
  StftConfig stft;  // sample_rate is taken from the input signal

  std::vector<Reference> references;  // oracle
  TvConfig tv;
  RpcaConfig rpca;
  RepetOptions repet;
  KamConfig kam;  // kam_cust kernels; n_iter also used by the other KAM methods
  int hpss_size = 17;

  /// Split an accompaniment estimate into harmonic and percussive parts.
  bool hpss = false;
  /// Keep only the partials of the voice F0 in the voice estimate; the rest
  /// moves to the harmonic (or accompaniment) estimate.
  bool f0_filter = false;
  YinConfig yin;
  F0FilterOptions f0;
};

/// STFT, method-specific masks, Wiener filtering and inversion, followed by
/// the optional HPSS and F0 refinements. Every returned signal has the
/// length and sample rate of x.
Separation separate(const AudioSignal& x, const SeparationOptions& opts);

struct DetectionOptions {
  SeparationOptions separation;
  VadConfig vad;
};

/// Separation, band-pass of mixture and voice estimate, VTMR and
/// thresholding. Throws if the separation produces no voice estimate.
DetectionLattice detect_pipeline(const AudioSignal& x, const DetectionOptions& opts);

}  // namespace morphsep
