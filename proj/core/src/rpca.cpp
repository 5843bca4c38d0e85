#include "morphsep/rpca.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace morphsep {

double RpcaConfig::lambda_for(Eigen::Index rows, Eigen::Index cols) const {
  if (lambda) return *lambda;
  return lambda_scale / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

double RpcaConfig::mu_for(double lambda_value) const { return mu ? *mu : 10.0 * lambda_value; }

double soft_threshold(double x, double tau) {
  if (!(tau >= 0.0)) throw Error("shrinkage threshold must be non-negative");
  const double mag = std::abs(x) - tau;
  if (mag <= 0.0) return 0.0;
  return x > 0.0 ? mag : -mag;
}

RealMatrix soft_threshold(const RealMatrix& x, double tau) {
  if (!(tau >= 0.0)) throw Error("shrinkage threshold must be non-negative");
  return x.unaryExpr([tau](double v) { return soft_threshold(v, tau); });
}

RealMatrix svt(const RealMatrix& x, double tau) {
  if (!(tau >= 0.0)) throw Error("singular value threshold must be non-negative");
  if (!x.allFinite()) throw Error("singular value thresholding needs finite input");
  if (x.size() == 0) return x;
  Eigen::BDCSVD<RealMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd shrunk = (svd.singularValues().array() - tau).cwiseMax(0.0);
  Eigen::Index rank = 0;
  while (rank < shrunk.size() && shrunk(rank) > 0.0) ++rank;
  if (rank == 0) return RealMatrix::Zero(x.rows(), x.cols());
  return svd.matrixU().leftCols(rank) * shrunk.head(rank).asDiagonal() *
         svd.matrixV().leftCols(rank).transpose();
}

double nuclear_norm(const RealMatrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::BDCSVD<RealMatrix> svd(x);
  return svd.singularValues().sum();
}

PcpResult pcp(const RealMatrix& w, const RpcaConfig& cfg) {
  if (!w.allFinite()) throw Error("PCP input has non-finite entries");
  if (cfg.n_iter < 1) throw Error("PCP needs at least one iteration");
  const double lambda = cfg.lambda_for(w.rows(), w.cols());
  const double mu = cfg.mu_for(lambda);
  if (!(lambda > 0.0) || !(mu > 0.0)) throw Error("PCP weights must be positive");

  PcpResult r;
  r.low_rank = RealMatrix::Zero(w.rows(), w.cols());
  r.sparse = RealMatrix::Zero(w.rows(), w.cols());
  const double w_norm = w.norm();
  if (w_norm == 0.0) return r;

  RealMatrix dual = RealMatrix::Zero(w.rows(), w.cols());
  const double inv_mu = 1.0 / mu;
  for (int it = 0; it < cfg.n_iter; ++it) {
    r.low_rank = svt(w - r.sparse + inv_mu * dual, inv_mu);
    r.sparse = soft_threshold(w - r.low_rank + inv_mu * dual, lambda * inv_mu);
    const RealMatrix gap = w - r.low_rank - r.sparse;
    dual += mu * gap;

    r.iterations_run = it + 1;
    r.final_residual = gap.norm() / w_norm;
    r.residual_history.push_back(r.final_residual);
    if (r.final_residual < cfg.tol) break;
  }
  return r;
}

Separation rpca_separate(const AudioSignal& x, const RpcaConfig& cfg,
                         const StftConfig& stft_cfg, double alpha) {
  StftConfig analysis = stft_cfg;
  analysis.sample_rate = x.sample_rate;
  const Stft mix = stft(x, analysis);
  RealMatrix power = spectrogram(mix, 1.0);
  const double peak = power.maxCoeff();
  if (peak > 0.0) power /= peak;

  const PcpResult parts = pcp(power, cfg);
  MaskSet masks;
  masks.alpha = alpha;
  masks.masks.push_back({SourceRole::voice, parts.sparse.cwiseAbs()});
  masks.masks.push_back({SourceRole::accompaniment, parts.low_rank.cwiseAbs()});
  return synthesize(mix, masks);
}

}  // namespace morphsep
