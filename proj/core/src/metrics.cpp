#include "morphsep/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace morphsep {

double ratio_db(double numerator, double denominator) {
  if (denominator <= 0.0) return numerator > 0.0 ? kSentinelDb : -kSentinelDb;
  if (numerator <= 0.0) return -kSentinelDb;
  return std::clamp(10.0 * std::log10(numerator / denominator), -kSentinelDb, kSentinelDb);
}

double rqf(const AudioSignal& reference, const AudioSignal& estimate) {
  if (reference.size() != estimate.size()) throw Error("RQF needs signals of equal length");
  const double ref = energy(reference);
  if (ref == 0.0) throw Error("RQF reference is silent");
  double err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.samples[i] - estimate.samples[i];
    err += d * d;
  }
  return ratio_db(ref, err);
}

BssDecomposition bss_decompose(const AudioSignal& estimate, const std::vector<AudioSignal>& references,
                               std::size_t target) {
  if (references.empty()) throw Error("BSS evaluation needs references");
  if (target >= references.size()) throw Error("target reference index out of range");
  const auto n = static_cast<Eigen::Index>(estimate.size());
  const auto count = static_cast<Eigen::Index>(references.size());

  Eigen::MatrixXd refs(n, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& r = references[static_cast<std::size_t>(j)];
    if (static_cast<Eigen::Index>(r.size()) != n) throw Error("reference length differs from the estimate");
    if (energy(r) == 0.0) throw Error("BSS reference is silent");
    refs.col(j) = Eigen::Map<const Eigen::VectorXd>(r.samples.data(), n);
  }
  const Eigen::Map<const Eigen::VectorXd> est(estimate.samples.data(), n);

  const Eigen::MatrixXd gram = refs.transpose() * refs;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  qr.setThreshold(1e-10);
  if (qr.rank() < count) throw Error("BSS references are linearly dependent");
  const Eigen::VectorXd coef = qr.solve(refs.transpose() * est);

  const auto t = static_cast<Eigen::Index>(target);
  const Eigen::VectorXd s_target = refs.col(t) * (refs.col(t).dot(est) / gram(t, t));
  const Eigen::VectorXd projection = refs * coef;

  BssDecomposition d;
  d.target.assign(s_target.data(), s_target.data() + n);
  d.interference.resize(static_cast<std::size_t>(n));
  d.artifact.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    d.interference[static_cast<std::size_t>(i)] = projection(i) - s_target(i);
    d.artifact[static_cast<std::size_t>(i)] = est(i) - projection(i);
  }
  return d;
}

BssScore bss_eval(const AudioSignal& estimate, const std::vector<AudioSignal>& references,
                  std::size_t target) {
  const auto d = bss_decompose(estimate, references, target);
  double e_target = 0.0, e_interf = 0.0, e_artif = 0.0, e_distortion = 0.0, e_projection = 0.0;
  for (std::size_t i = 0; i < d.target.size(); ++i) {
    e_target += d.target[i] * d.target[i];
    e_interf += d.interference[i] * d.interference[i];
    e_artif += d.artifact[i] * d.artifact[i];
    const double dist = d.interference[i] + d.artifact[i];
    e_distortion += dist * dist;
    const double proj = d.target[i] + d.interference[i];
    e_projection += proj * proj;
  }
  return {ratio_db(e_target, e_distortion), ratio_db(e_target, e_interf),
          ratio_db(e_projection, e_artif)};
}

std::vector<SeparationScore> score_separation(const std::vector<AudioSignal>& estimates,
                                              const std::vector<AudioSignal>& references) {
  if (estimates.size() != references.size())
    throw Error("one reference per estimate is required");
  std::vector<SeparationScore> out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto bss = bss_eval(estimates[i], references, i);
    out.push_back({rqf(references[i], estimates[i]), bss.sdr_db, bss.sir_db, bss.sar_db});
  }
  return out;
}

double f_measure(double recall, double precision) {
  const double sum = recall + precision;
  return sum > 0.0 ? 2.0 * recall * precision / sum : 0.0;
}

namespace {

ClassScore score_class(const std::vector<bool>& predicted, const std::vector<bool>& truth, bool cls) {
  std::size_t hits = 0, in_truth = 0, in_pred = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == cls;
    const bool p = predicted[i] == cls;
    in_truth += t;
    in_pred += p;
    hits += t && p;
  }
  ClassScore s;
  if (in_truth > 0)
    s.recall = static_cast<double>(hits) / static_cast<double>(in_truth);
  else if (in_pred == 0)
    s.recall = 1.0;
  if (in_pred > 0)
    s.precision = static_cast<double>(hits) / static_cast<double>(in_pred);
  else if (in_truth == 0)
    s.precision = 1.0;
  return s;
}

double average(std::initializer_list<std::optional<double>> values) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : values)
    if (v) {
      sum += *v;
      ++n;
    }
  return n > 0 ? sum / n : 0.0;
}

}  // namespace

DetectionScore detection_metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) throw Error("prediction and truth differ in frame count");
  DetectionScore s;
  s.voice = score_class(predicted, truth, true);
  s.music = score_class(predicted, truth, false);
  s.av_rec = average({s.voice.recall, s.music.recall});
  s.av_prec = average({s.voice.precision, s.music.precision});
  s.f_meas = f_measure(s.av_rec, s.av_prec);
  return s;
}

}  // namespace morphsep
