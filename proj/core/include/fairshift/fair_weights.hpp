#pragma once

#include <array>
#include <string>

#include "fairshift/dataset.hpp"

namespace fairshift {

enum class FairConstraint { kSpd, kEod };

std::string to_string(FairConstraint c);

// Reweighing weights W_ys = P(Y=y) P(S=s) / P(Y=y, S=s).
struct ReweighWeights {
  PerSubgroup<double> w{};
  double operator()(int y, int s) const { return w[subgroup_index(y, s)]; }
};

// Empirical weights of a dataset. Throws DegenerateSubgroupError if any
// subgroup is empty.
ReweighWeights reweigh_weights(const LabeledDataset& ds);
ReweighWeights reweigh_weights_from_counts(const PerSubgroup<std::size_t>& counts);
// Same formula on a joint (y, s) distribution.
ReweighWeights reweigh_weights_from_probs(const PerSubgroup<double>& probs);

// Per-group false-positive / false-negative loss weights. Under 0/1 loss the
// minimizer predicts 1 exactly when eta > fp / (fp + fn).
struct CostWeights {
  std::array<double, 2> fp{0.5, 0.5};
  std::array<double, 2> fn{0.5, 0.5};

  // Per-sample weight for a row with label y in group s.
  double for_row(int y, int s) const { return y == 1 ? fn[s] : fp[s]; }
};

// Accuracy-fairness trade-off for the fair Bayes optimal classifier.
struct TradeoffParams {
  double lambda = 0.0;
  FairConstraint constraint = FairConstraint::kSpd;
  // P(Y = 1); required for EOD.
  double base_rate = 0.5;
  int tie_break = 1;
};

// Threshold on eta(x, s) of the fair Bayes optimal classifier: predict 1 iff
// eta > threshold. +inf means never. Throws std::domain_error at the EOD
// singularities lambda = +-2 P(Y=1).
double fair_threshold(const TradeoffParams& params, int s);

// Threshold on the biased posterior that reproduces `threshold` on the
// original posterior, when the (1,0) subgroup is retained at `retention_ratio`
// times the rate of (0,0) (beta_pos / beta_neg). Clamped to [0, 1].
double biased_threshold(double threshold, double retention_ratio);

// Cost weights whose weighted 0/1 risk on the biased distribution is
// minimized by the SPD fair Bayes optimal classifier of the original one.
// `beta` is the retention ratio of the (1,0) subgroup. Throws
// std::domain_error at lambda = 1.
CostWeights corrected_weights_spd(double beta, double lambda);

// EOD counterpart. p_10 and p_11 are subgroup probabilities of the original
// distribution; their sum is the base rate P(Y=1) of the corollary.
CostWeights corrected_weights_eod(double beta, double lambda, double p_10, double p_11);

CostWeights corrected_weights(FairConstraint c, double beta, double lambda, double p_10, double p_11);

// Fair-adjusted score s*(x, s):
//   SPD: eta - (1 - lambda)/2 for s = 0, eta - (1 + lambda)/2 for s = 1
//   EOD: (1 + lambda/(2 P(Y=1))) eta - 1/2 for s = 0,
//        (1 - lambda/(2 P(Y=1))) eta - 1/2 for s = 1
double fair_adjusted_score(double eta, int s, const TradeoffParams& params);

// H_alpha(s*) = [s* > 0] + tie_break [s* = 0].
int plugin_fair_predict(double eta, int s, const TradeoffParams& params);

}  // namespace fairshift
