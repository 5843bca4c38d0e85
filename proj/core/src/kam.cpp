#include "morphsep/kam.hpp"

#include <algorithm>
#include <cmath>

namespace morphsep {

namespace {

void require_odd(int n, const char* what) {
  if (n <= 0 || n % 2 == 0) throw Error(std::string("kernel ") + what + " must be odd and positive");
}

// Median of buf[0, n); reorders the buffer.
double median_in_place(std::vector<double>& buf, std::size_t n) {
  if (n == 0) return 0.0;
  const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(buf.begin(), mid, buf.begin() + static_cast<std::ptrdiff_t>(n));
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(buf.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t gather(const RealMatrix& m, const std::vector<TapOffset>& taps, Eigen::Index f,
                   Eigen::Index t, std::vector<double>& buf) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  std::size_t n = 0;
  for (const auto& tap : taps) {
    const Eigen::Index ff = f + tap.df;
    const Eigen::Index tt = t + tap.dt;
    if (ff < 0 || ff >= rows || tt < 0 || tt >= cols) continue;
    buf[n++] = m(ff, tt);
  }
  return n;
}

}  // namespace

void Kernel::validate() const {
  require_odd(static_cast<int>(h()), "height");
  require_odd(static_cast<int>(w()), "width");
  if (!values.allFinite()) throw Error("kernel has non-finite values");
  if (binary) {
    if (((values.array() != 0.0) && (values.array() != 1.0)).any())
      throw Error("binary kernel contains values other than 0 and 1");
    if ((values.array() == 1.0).count() == 0) throw Error("binary kernel has no active taps");
  } else if ((values.array() < 0.0).any()) {
    throw Error("trained kernel has negative values");
  }
}

Kernel kernel_harmonic(int w, SourceRole label) {
  require_odd(w, "width");
  return Kernel{RealMatrix::Ones(1, w), label, true, std::nullopt};
}

Kernel kernel_percussive(int h, SourceRole label) {
  require_odd(h, "height");
  return Kernel{RealMatrix::Ones(h, 1), label, true, std::nullopt};
}

Kernel kernel_repet(int period, int count, SourceRole label) {
  if (period < 1) throw Error("repetition period must be at least one frame");
  if (count < 2) throw Error("repetition kernel needs at least two taps");
  if (count % 2 == 0) throw Error("repetition tap count must be odd so the kernel is centered");
  const int width = period * (count - 1) + 1;
  RealMatrix v = RealMatrix::Zero(1, width);
  for (int i = 0; i < count; ++i) v(0, i * period) = 1.0;
  return Kernel{std::move(v), label, true, std::nullopt};
}

Kernel kernel_cross(int h, int w, SourceRole label) {
  require_odd(h, "height");
  require_odd(w, "width");
  RealMatrix v = RealMatrix::Zero(h, w);
  v.row(h / 2).setOnes();
  v.col(w / 2).setOnes();
  return Kernel{std::move(v), label, true, std::nullopt};
}

std::vector<TapOffset> kernel_taps(const Kernel& k) {
  k.validate();
  if (!k.binary) throw Error("median filtering needs a binary kernel");
  const int ch = static_cast<int>(k.h() / 2);
  const int cw = static_cast<int>(k.w() / 2);
  std::vector<TapOffset> taps;
  for (Eigen::Index c = 0; c < k.w(); ++c)
    for (Eigen::Index r = 0; r < k.h(); ++r)
      if (k.values(r, c) == 1.0) taps.push_back({static_cast<int>(r) - ch, static_cast<int>(c) - cw});
  return taps;
}

double median_neighborhood(const RealMatrix& m, const Kernel& k, Eigen::Index f, Eigen::Index t) {
  const auto taps = kernel_taps(k);
  std::vector<double> buf(taps.size());
  const std::size_t n = gather(m, taps, f, t, buf);
  for (std::size_t i = 0; i < n; ++i) buf[i] = std::abs(buf[i]);
  return median_in_place(buf, n);
}

RealMatrix median_filter(const RealMatrix& m, const Kernel& k) {
  const auto taps = kernel_taps(k);
  std::vector<double> buf(taps.size());
  RealMatrix out(m.rows(), m.cols());
  for (Eigen::Index t = 0; t < m.cols(); ++t)
    for (Eigen::Index f = 0; f < m.rows(); ++f) {
      const std::size_t n = gather(m, taps, f, t, buf);
      for (std::size_t i = 0; i < n; ++i) buf[i] = std::abs(buf[i]);
      out(f, t) = median_in_place(buf, n);
    }
  return out;
}

void KamConfig::validate() const {
  if (kernels.size() < 2) throw Error("KAM needs at least two kernels");
  if (!(alpha > 0.0)) throw Error("Wiener exponent alpha must be positive");
  if (n_iter < 1) throw Error("KAM needs at least one iteration");
  for (const auto& k : kernels) {
    k.validate();
    if (!k.binary) throw Error("KAM separation needs binary kernels; binarize trained kernels first");
  }
}

std::vector<RealMatrix> kam_gains(const Stft& mixture, const KamConfig& cfg,
                                  const KamObserver& observer) {
  cfg.validate();
  const std::size_t count = cfg.kernels.size();
  const Eigen::Index rows = mixture.bins();
  const Eigen::Index cols = mixture.frames();
  const RealMatrix mix_mag = magnitude(mixture);

  std::vector<std::vector<TapOffset>> taps;
  std::size_t widest = 0;
  for (const auto& k : cfg.kernels) {
    taps.push_back(kernel_taps(k));
    widest = std::max(widest, taps.back().size());
  }

  const double uniform = 1.0 / static_cast<double>(count);
  std::vector<RealMatrix> gains(count, RealMatrix::Constant(rows, cols, uniform));
  std::vector<RealMatrix> mags(count, mix_mag * uniform);
  std::vector<double> buf(widest), medians(count), fractions(count);

  for (int it = 0; it < cfg.n_iter; ++it) {
    if (cfg.update == KamUpdate::in_place) {
      for (Eigen::Index t = 0; t < cols; ++t) {
        for (Eigen::Index f = 0; f < rows; ++f) {
          for (std::size_t i = 0; i < count; ++i)
            medians[i] = median_in_place(buf, gather(mags[i], taps[i], f, t, buf));
          wiener_fractions(medians, cfg.alpha, fractions);
          for (std::size_t i = 0; i < count; ++i) {
            gains[i](f, t) = fractions[i];
            mags[i](f, t) = fractions[i] * mix_mag(f, t);
          }
        }
      }
    } else {
      std::vector<RealMatrix> filtered;
      filtered.reserve(count);
      for (std::size_t i = 0; i < count; ++i) filtered.push_back(median_filter(mags[i], cfg.kernels[i]));
      for (Eigen::Index t = 0; t < cols; ++t) {
        for (Eigen::Index f = 0; f < rows; ++f) {
          for (std::size_t i = 0; i < count; ++i) medians[i] = filtered[i](f, t);
          wiener_fractions(medians, cfg.alpha, fractions);
          for (std::size_t i = 0; i < count; ++i) {
            gains[i](f, t) = fractions[i];
            mags[i](f, t) = fractions[i] * mix_mag(f, t);
          }
        }
      }
    }
    if (observer) observer(it + 1, gains);
  }
  return gains;
}

Separation kam_separate(const Stft& mixture, const KamConfig& cfg, const KamObserver& observer) {
  const auto gains = kam_gains(mixture, cfg, observer);
  Separation out;
  out.reserve(gains.size());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    Stft est = mixture.with_data(mixture.data.cwiseProduct(gains[i].cast<std::complex<double>>()));
    AudioSignal signal = istft(est);
    out.push_back({cfg.kernels[i].label, std::move(signal), std::move(est)});
  }
  return out;
}

Separation kam_hpss(const Stft& mixture, int h, int w, double alpha, int n_iter) {
  KamConfig cfg;
  cfg.kernels = {kernel_harmonic(w), kernel_percussive(h)};
  cfg.alpha = alpha;
  cfg.n_iter = n_iter;
  return kam_separate(mixture, cfg);
}

Kernel train_kernel(const Stft& source, int h, int w, SourceRole label) {
  require_odd(h, "height");
  require_odd(w, "width");
  const RealMatrix mag = magnitude(source);
  const Eigen::Index rows = mag.rows();
  const Eigen::Index cols = mag.cols();
  if (rows < h || cols < w) throw Error("source spectrogram is smaller than the kernel");

  const Eigen::Index ch = h / 2;
  const Eigen::Index cw = w / 2;
  // Compensated sums: thousands of patches otherwise drift by several ulps.
  RealMatrix acc = RealMatrix::Zero(h, w);
  RealMatrix acc_err = RealMatrix::Zero(h, w);
  double total_power = 0.0;
  double total_err = 0.0;
  auto kahan = [](double& sum, double& err, double v) {
    const double y = v - err;
    const double next = sum + y;
    err = (next - sum) - y;
    sum = next;
  };

  // Only centers whose full patch lies on the grid contribute.
  for (Eigen::Index t = cw; t < cols - cw; ++t) {
    for (Eigen::Index f = ch; f < rows - ch; ++f) {
      const double power = mag(f, t) * mag(f, t);
      if (power == 0.0) continue;
      const auto patch = mag.block(f - ch, t - cw, h, w);
      const double scale = power / patch.norm();
      for (Eigen::Index c = 0; c < w; ++c)
        for (Eigen::Index r = 0; r < h; ++r) kahan(acc(r, c), acc_err(r, c), scale * patch(r, c));
      kahan(total_power, total_err, power);
    }
  }
  if (total_power == 0.0) throw Error("cannot train a kernel on a silent source");
  return Kernel{acc / total_power, label, false, std::nullopt};
}

Kernel binarize_kernel(const Kernel& trained, double threshold, ThresholdScale scale) {
  if (trained.values.size() == 0) throw Error("cannot binarize an empty kernel");
  if (scale == ThresholdScale::peak) threshold *= trained.values.maxCoeff();
  Kernel out{(trained.values.array() > threshold).cast<double>().matrix(), trained.label, true,
             threshold};
  if ((out.values.array() == 1.0).count() == 0)
    throw Error("no kernel value exceeds the threshold " + std::to_string(threshold) +
                "; choose a lower threshold");
  return out;
}

int estimate_repetition_period(const RealMatrix& power, int min_lag, int max_lag) {
  const auto frames = static_cast<int>(power.cols());
  max_lag = std::min(max_lag, frames - 1);
  if (min_lag < 1 || max_lag < min_lag) throw Error("no admissible repetition lag for this signal");

  // Mean over bins of the per-row autocorrelation coefficient, each lag
  // normalized by the number of overlapping frames. Normalizing rows keeps a
  // few loud partials (a vibrato voice, say) from drowning out a broadband
  // repeating pattern.
  std::vector<double> beat(static_cast<std::size_t>(max_lag) + 1, 0.0);
  Eigen::VectorXd row(frames);
  for (Eigen::Index f = 0; f < power.rows(); ++f) {
    row = power.row(f).transpose();
    row.array() -= row.mean();
    const double variance = row.squaredNorm() / frames;
    if (!(variance > 0.0)) continue;
    for (int lag = 0; lag <= max_lag; ++lag)
      beat[static_cast<std::size_t>(lag)] +=
          row.head(frames - lag).dot(row.tail(frames - lag)) / (static_cast<double>(frames - lag) * variance);
  }

  // A period that is not a whole number of frames splits its peak over two
  // neighbouring lags, so lags are compared by their strength plus that of
  // their stronger neighbour.
  const std::size_t last = beat.size() - 1;
  auto strength = [&](int lag) {
    const auto i = static_cast<std::size_t>(lag);
    const double left = beat[i - 1];
    const double right = i < last ? beat[i + 1] : 0.0;
    return beat[i] + std::max(0.0, std::max(left, right));
  };
  int best = min_lag;
  for (int lag = min_lag; lag <= max_lag; ++lag)
    if (strength(lag) > strength(best)) best = lag;
  if (beat[static_cast<std::size_t>(best)] <= 0.0) return best;

  // Prefer the shortest peak nearly as strong as the best one, so multiples
  // of the period are not chosen.
  const double floor = 0.8 * strength(best);
  for (int lag = min_lag; lag < best; ++lag) {
    const auto i = static_cast<std::size_t>(lag);
    const bool peak = beat[i] >= beat[i - 1] && beat[i] >= beat[i + 1];
    if (peak && beat[i] > 0.0 && strength(lag) >= floor) return lag;
  }
  return best;
}

Separation kam_repet_separate(const Stft& mixture, const RepetOptions& opts, double alpha,
                              int n_iter) {
  int period = 0;
  if (opts.period_frames) {
    period = *opts.period_frames;
  } else {
    const double frame_s = static_cast<double>(mixture.config.hop) / mixture.config.sample_rate;
    const int min_lag = std::max(1, static_cast<int>(std::lround(opts.min_period_s / frame_s)));
    // At least `count` repetitions must fit in the signal.
    const int fit = static_cast<int>(mixture.frames() - 1) / std::max(1, opts.count - 1);
    const int max_lag =
        std::min(static_cast<int>(std::lround(opts.max_period_s / frame_s)), std::max(fit, min_lag));
    period = estimate_repetition_period(spectrogram(mixture, 1.0), min_lag, max_lag);
  }
  KamConfig cfg;
  cfg.kernels = {kernel_cross(opts.voice_size, opts.voice_size, SourceRole::voice),
                 kernel_repet(period, opts.count, SourceRole::accompaniment)};
  cfg.alpha = alpha;
  cfg.n_iter = n_iter;
  return kam_separate(mixture, cfg);
}

}  // namespace morphsep
