#include "morphsep/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace morphsep {

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-12) return 1.0;
  const double a = std::numbers::pi * u;
  return std::sin(a) / a;
}

class KernelTable {
 public:
  KernelTable(long up, long down, const ResampleOptions& opts)
      : up_(up), down_(down), beta_(opts.kaiser_beta) {
    const double ratio = static_cast<double>(up) / static_cast<double>(down);
    fc_ = opts.cutoff * std::min(1.0, ratio);  // cycles per input sample
    half_ = static_cast<long>(std::ceil(opts.zero_crossings * std::max(1.0, 1.0 / ratio)));
    i0_beta_ = std::cyl_bessel_i(0.0, beta_);
    constexpr long kMaxTable = 1L << 22;
    if (up_ * 2 * half_ <= kMaxTable) {
      table_.resize(static_cast<std::size_t>(up_ * 2 * half_));
      for (long p = 0; p < up_; ++p) fill(p, &table_[static_cast<std::size_t>(p * 2 * half_)]);
    }
  }

  long half() const { return half_; }

  // Weights for taps floor(tau) - half + 1 .. floor(tau) + half, where the
  // fractional part of tau is phase / up.
  const double* weights(long phase, std::vector<double>& scratch) const {
    if (!table_.empty()) return &table_[static_cast<std::size_t>(phase * 2 * half_)];
    scratch.resize(static_cast<std::size_t>(2 * half_));
    fill(phase, scratch.data());
    return scratch.data();
  }

 private:
  void fill(long phase, double* out) const {
    const double frac = static_cast<double>(phase) / static_cast<double>(up_);
    const double span = static_cast<double>(half_);
    double total = 0.0;
    for (long k = 0; k < 2 * half_; ++k) {
      const double d = static_cast<double>(k - half_ + 1) - frac;
      const double r = d / span;
      const double win =
          std::abs(r) >= 1.0 ? 0.0 : std::cyl_bessel_i(0.0, beta_ * std::sqrt(1.0 - r * r)) / i0_beta_;
      out[k] = 2.0 * fc_ * sinc(2.0 * fc_ * d) * win;
      total += out[k];
    }
    // unit DC gain for every phase
    if (total != 0.0)
      for (long k = 0; k < 2 * half_; ++k) out[k] /= total;
  }

  long up_, down_;
  double beta_, fc_ = 0.5, i0_beta_ = 1.0;
  long half_ = 1;
  std::vector<double> table_;
};

}  // namespace

AudioSignal resample(const AudioSignal& x, double target_rate, const ResampleOptions& opts) {
  if (!(target_rate > 0.0)) throw Error("target sample rate must be positive");
  if (!(x.sample_rate > 0.0)) throw Error("input sample rate must be positive");
  const long src = std::lround(x.sample_rate);
  const long dst = std::lround(target_rate);
  if (src == dst) return x;

  const long g = std::gcd(src, dst);
  const long up = dst / g;
  const long down = src / g;
  const KernelTable kernel(up, down, opts);

  const auto in_len = static_cast<long>(x.size());
  const auto out_len = static_cast<long>(
      std::llround(static_cast<double>(in_len) * static_cast<double>(up) / static_cast<double>(down)));
  AudioSignal out(std::vector<double>(static_cast<std::size_t>(out_len), 0.0),
                  static_cast<double>(dst));

  std::vector<double> scratch;
  const long half = kernel.half();
  for (long j = 0; j < out_len; ++j) {
    const long num = j * down;
    const long base = num / up;
    const long phase = num % up;
    const double* w = kernel.weights(phase, scratch);
    double acc = 0.0;
    const long first = base - half + 1;
    const long lo = std::max(0L, first);
    const long hi = std::min(in_len - 1, base + half);
    for (long i = lo; i <= hi; ++i) acc += w[i - first] * x.samples[static_cast<std::size_t>(i)];
    out.samples[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

}  // namespace morphsep
