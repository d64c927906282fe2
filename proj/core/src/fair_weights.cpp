#include "fairshift/fair_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairshift/error.hpp"

namespace fairshift {

std::string to_string(FairConstraint c) { return c == FairConstraint::kSpd ? "spd" : "eod"; }

ReweighWeights reweigh_weights_from_counts(const PerSubgroup<std::size_t>& counts) {
  for (auto c : counts) {
    if (c == 0) throw DegenerateSubgroupError("reweigh_weights: empty subgroup");
  }
  const std::size_t n = counts[0] + counts[1] + counts[2] + counts[3];
  const std::array<std::size_t, 2> n_y = {counts[0] + counts[1], counts[2] + counts[3]};
  const std::array<std::size_t, 2> n_s = {counts[0] + counts[2], counts[1] + counts[3]};
  ReweighWeights rw;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto y = static_cast<std::size_t>(subgroup_label(k));
    const auto s = static_cast<std::size_t>(subgroup_group(k));
    // n_y n_s / (n n_ys), as one correctly rounded division.
    rw.w[k] = static_cast<double>(n_y[y] * n_s[s]) / static_cast<double>(n * counts[k]);
  }
  return rw;
}

ReweighWeights reweigh_weights(const LabeledDataset& ds) {
  PerSubgroup<std::size_t> counts{};
  for (std::size_t i = 0; i < ds.size(); ++i) ++counts[ds.subgroup_of(i)];
  return reweigh_weights_from_counts(counts);
}

ReweighWeights reweigh_weights_from_probs(const PerSubgroup<double>& p) {
  for (double v : p) {
    if (!(v > 0.0)) throw DegenerateSubgroupError("reweigh_weights: zero-mass subgroup");
  }
  const double total = p[0] + p[1] + p[2] + p[3];
  const std::array<double, 2> py = {(p[0] + p[1]) / total, (p[2] + p[3]) / total};
  const std::array<double, 2> ps = {(p[0] + p[2]) / total, (p[1] + p[3]) / total};
  ReweighWeights rw;
  for (std::size_t k = 0; k < 4; ++k) {
    rw.w[k] = py[static_cast<std::size_t>(subgroup_label(k))] *
              ps[static_cast<std::size_t>(subgroup_group(k))] / (p[k] / total);
  }
  return rw;
}

double fair_threshold(const TradeoffParams& params, int s) {
  const double lambda = params.lambda;
  if (params.constraint == FairConstraint::kSpd) {
    return s == 0 ? 0.5 * (1.0 - lambda) : 0.5 * (1.0 + lambda);
  }
  const double p = params.base_rate;
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("EOD requires base_rate in (0, 1)");
  const double slope = s == 0 ? 1.0 + lambda / (2.0 * p) : 1.0 - lambda / (2.0 * p);
  if (std::abs(slope) < 1e-12) {
    throw std::domain_error("EOD trade-off is singular at lambda = +-2 P(Y=1)");
  }
  // slope * eta - 1/2 > 0; with slope < 0 no eta in [0, 1] qualifies.
  return slope > 0.0 ? 0.5 / slope : std::numeric_limits<double>::infinity();
}

double biased_threshold(double threshold, double retention_ratio) {
  if (!(retention_ratio > 0.0) || !std::isfinite(retention_ratio)) {
    throw std::invalid_argument("retention ratio must be positive");
  }
  if (threshold <= 0.0) return 0.0;
  if (threshold >= 1.0) return 1.0;
  // eta_b = r eta / (r eta + 1 - eta) is increasing in eta.
  const double rt = retention_ratio * threshold;
  return rt / (rt + 1.0 - threshold);
}

namespace {

CostWeights weights_from_thresholds(double c0, double c1) {
  CostWeights w;
  w.fp = {c0, c1};
  w.fn = {1.0 - c0, 1.0 - c1};
  return w;
}

}  // namespace

CostWeights corrected_weights_spd(double beta, double lambda) {
  if (lambda == 1.0) throw std::domain_error("SPD correction is singular at lambda = 1");
  TradeoffParams tp;
  tp.lambda = lambda;
  tp.constraint = FairConstraint::kSpd;
  const double c0 = biased_threshold(fair_threshold(tp, 0), beta);
  const double c1 = std::clamp(fair_threshold(tp, 1), 0.0, 1.0);
  return weights_from_thresholds(c0, c1);
}

CostWeights corrected_weights_eod(double beta, double lambda, double p_10, double p_11) {
  TradeoffParams tp;
  tp.lambda = lambda;
  tp.constraint = FairConstraint::kEod;
  tp.base_rate = p_10 + p_11;
  const double c0 = biased_threshold(fair_threshold(tp, 0), beta);
  const double c1 = std::clamp(fair_threshold(tp, 1), 0.0, 1.0);
  return weights_from_thresholds(c0, c1);
}

CostWeights corrected_weights(FairConstraint c, double beta, double lambda, double p_10,
                              double p_11) {
  return c == FairConstraint::kSpd ? corrected_weights_spd(beta, lambda)
                                   : corrected_weights_eod(beta, lambda, p_10, p_11);
}

double fair_adjusted_score(double eta, int s, const TradeoffParams& params) {
  const double lambda = params.lambda;
  if (params.constraint == FairConstraint::kSpd) {
    return s == 0 ? eta - 0.5 * (1.0 - lambda) : eta - 0.5 * (1.0 + lambda);
  }
  const double p = params.base_rate;
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("EOD requires base_rate in (0, 1)");
  const double shift = lambda / (2.0 * p);
  return s == 0 ? (1.0 + shift) * eta - 0.5 : (1.0 - shift) * eta - 0.5;
}

int plugin_fair_predict(double eta, int s, const TradeoffParams& params) {
  const double score = fair_adjusted_score(eta, s, params);
  if (score > 0.0) return 1;
  return score == 0.0 ? params.tie_break : 0;
}

}  // namespace fairshift
