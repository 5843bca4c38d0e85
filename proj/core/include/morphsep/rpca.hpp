#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "morphsep/audio.hpp"
#include "morphsep/masking.hpp"
#include "morphsep/stft.hpp"

namespace morphsep {

struct RpcaConfig {
  /// Sparsity weight; defaults to lambda_scale / sqrt(max(rows, cols)).
  std::optional<double> lambda;
  double lambda_scale = 1.0;
  /// Augmented-Lagrangian penalty; defaults to 10 * lambda.
  std::optional<double> mu;
  int n_iter = 1000;
  /// Stop once ||W - L - S||_F / ||W||_F < tol. Zero runs all iterations.
  double tol = 1e-7;

  double lambda_for(Eigen::Index rows, Eigen::Index cols) const;
  double mu_for(double lambda_value) const;
};

struct PcpResult {
  RealMatrix low_rank;  // accompaniment
  RealMatrix sparse;    // voice
  int iterations_run = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
};

/// sign(x) * max(|x| - tau, 0).
double soft_threshold(double x, double tau);
RealMatrix soft_threshold(const RealMatrix& x, double tau);

/// Singular value thresholding: U * soft_threshold(Sigma, tau) * V^T.
RealMatrix svt(const RealMatrix& x, double tau);

double nuclear_norm(const RealMatrix& x);

/// Principal component pursuit by alternating directions:
///   L <- svt(W - S + Y/mu, 1/mu)
///   S <- soft_threshold(W - L + Y/mu, lambda/mu)
///   Y <- Y + mu (W - L - S)
PcpResult pcp(const RealMatrix& w, const RpcaConfig& cfg = {});

/// Voice/accompaniment split of a mixture. The power spectrogram is scaled
/// to unit peak before pursuit; masks |S| and |L| then drive the Wiener
/// filter with exponent `alpha`.
Separation rpca_separate(const AudioSignal& x, const RpcaConfig& cfg = {},
                         const StftConfig& stft_cfg = {}, double alpha = 2.0);

}  // namespace morphsep
