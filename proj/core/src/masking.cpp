#include "morphsep/masking.hpp"

#include <algorithm>
#include <cmath>

namespace morphsep {

void MaskSet::validate() const {
  if (masks.empty()) throw Error("mask set is empty");
  if (!(alpha > 0.0)) throw Error("Wiener exponent alpha must be positive");
  const auto rows = masks.front().values.rows();
  const auto cols = masks.front().values.cols();
  for (const auto& m : masks) {
    if (m.values.rows() != rows || m.values.cols() != cols)
      throw Error("mask dimensions differ");
    if ((m.values.array() < 0.0).any()) throw Error("mask has negative entries");
    if (!m.values.allFinite()) throw Error("mask has non-finite entries");
  }
}

void wiener_fractions(std::span<const double> m, double alpha, std::span<double> out) {
  double peak = 0.0;
  for (double v : m) peak = std::max(peak, v);
  if (peak == 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(m.size()));
    return;
  }
  // Normalizing by the largest mask keeps M^alpha in range; the ratio is
  // unchanged.
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i] = alpha == 2.0 ? (m[i] / peak) * (m[i] / peak) : std::pow(m[i] / peak, alpha);
    total += out[i];
  }
  for (auto& v : out) v /= total;
}

std::vector<RealMatrix> wiener_gains(const MaskSet& set) {
  set.validate();
  const std::size_t count = set.size();
  const auto rows = set.masks.front().values.rows();
  const auto cols = set.masks.front().values.cols();
  std::vector<RealMatrix> gains(count, RealMatrix(rows, cols));
  std::vector<double> values(count), fractions(count);

  for (Eigen::Index t = 0; t < cols; ++t) {
    for (Eigen::Index f = 0; f < rows; ++f) {
      for (std::size_t i = 0; i < count; ++i) values[i] = set.masks[i].values(f, t);
      wiener_fractions(values, set.alpha, fractions);
      for (std::size_t i = 0; i < count; ++i) gains[i](f, t) = fractions[i];
    }
  }
  return gains;
}

std::vector<Stft> wiener_apply(const Stft& mixture, const MaskSet& masks) {
  masks.validate();
  const auto& first = masks.masks.front().values;
  if (first.rows() != mixture.bins() || first.cols() != mixture.frames())
    throw Error("mask dimensions do not match the mixture STFT");

  const auto gains = wiener_gains(masks);
  std::vector<Stft> out;
  out.reserve(gains.size());
  for (const auto& g : gains)
    out.push_back(mixture.with_data(mixture.data.cwiseProduct(g.cast<std::complex<double>>())));
  return out;
}

MaskSet oracle_masks(const std::vector<Stft>& sources,
                     const std::vector<SourceRole>& roles, double alpha) {
  if (sources.size() < 2) throw Error("oracle separation needs at least two sources");
  if (roles.size() != sources.size()) throw Error("one role per oracle source is required");
  MaskSet set;
  set.alpha = alpha;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].data.rows() != sources[0].data.rows() ||
        sources[i].data.cols() != sources[0].data.cols())
      throw Error("oracle source STFTs differ in size");
    set.masks.push_back({roles[i], magnitude(sources[i])});
  }
  return set;
}

}  // namespace morphsep

namespace morphsep {

Separation synthesize(const Stft& mixture, const MaskSet& masks) {
  auto estimates = wiener_apply(mixture, masks);
  Separation out;
  out.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    AudioSignal signal = istft(estimates[i]);
    out.push_back({masks.masks[i].role, std::move(signal), std::move(estimates[i])});
  }
  return out;
}

const SeparatedSource* find_role(const Separation& sep, SourceRole role) {
  for (const auto& s : sep)
    if (s.role == role) return &s;
  return nullptr;
}

}  // namespace morphsep
