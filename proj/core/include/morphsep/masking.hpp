#pragma once

#include <span>
#include <vector>

#include "morphsep/audio.hpp"
#include "morphsep/stft.hpp"

namespace morphsep {

struct LabeledMask {
  SourceRole role = SourceRole::other;
  RealMatrix values;  // F x T, non-negative
};

/// Non-negative source masks sharing one time-frequency grid, combined by
/// the parameterized Wiener rule with exponent `alpha`.
struct MaskSet {
  std::vector<LabeledMask> masks;
  double alpha = 2.0;

  std::size_t size() const { return masks.size(); }
  /// Throws Error if empty, if dimensions differ or if any entry is negative.
  void validate() const;
};

/// Wiener fractions at a single bin: out[i] = m[i]^alpha / sum_j m[j]^alpha,
/// or 1/I when every m[i] is zero.
void wiener_fractions(std::span<const double> mask_values, double alpha,
                      std::span<double> out);

/// Fraction of bin (f, t) assigned to each mask: M_i^alpha / sum_j M_j^alpha.
/// Bins where every mask is zero are split uniformly.
std::vector<RealMatrix> wiener_gains(const MaskSet& masks);

/// S_i = gain_i * X for every mask; the outputs sum to X.
std::vector<Stft> wiener_apply(const Stft& mixture, const MaskSet& masks);

/// Oracle masks |S_i| from the true source STFTs.
MaskSet oracle_masks(const std::vector<Stft>& sources,
                     const std::vector<SourceRole>& roles, double alpha = 2.0);

}  // namespace morphsep

namespace morphsep {

/// One estimated source, in the time domain and as the STFT it was
/// synthesized from.
struct SeparatedSource {
  SourceRole role = SourceRole::other;
  AudioSignal signal;
  Stft stft;
};

using Separation = std::vector<SeparatedSource>;

/// wiener_apply followed by istft of every estimate.
Separation synthesize(const Stft& mixture, const MaskSet& masks);

/// First source with the given role, or nullptr.
const SeparatedSource* find_role(const Separation& sep, SourceRole role);

}  // namespace morphsep
