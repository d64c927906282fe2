#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fairshift/dataset.hpp"
#include "fairshift/logistic.hpp"

namespace fairshift {

// Mixture of thresholded linear scorers; component k is used with
// probability weights[k].
struct RandomizedClassifier {
  std::vector<LinearScorer> components;
  std::vector<double> weights;
  double threshold = 0.5;

  void validate() const;
  // P(Yhat = 1) per row.
  std::vector<double> positive_probability(const LabeledDataset& ds) const;
  // One component drawn per row from `seed`.
  std::vector<std::uint8_t> predict(const LabeledDataset& ds, std::uint64_t seed) const;
};

enum class ExpgradConstraint {
  // TPR and FPR parity: moments for y = 0 and y = 1.
  kEqualizedOdds,
  // TPR parity only.
  kEqualOpportunity,
};

struct ExpgradConfig {
  ExpgradConstraint constraint = ExpgradConstraint::kEqualizedOdds;
  double eps = 0.01;
  int iterations = 50;
  // L1 cap on the multiplier vector.
  double multiplier_bound = 10.0;
  // Step size at iteration t is learning_rate / sqrt(t).
  double learning_rate = 0.5;
  LrConfig lr;
  // Optional starting multipliers (log-weights); zero when empty.
  std::vector<double> initial_theta;
};

struct ExpgradResult {
  RandomizedClassifier classifier;
  // max_k gamma_k(Q) - eps over the signed constraints, on training data.
  double max_violation = 0.0;
  bool within_tolerance = false;
  int iterations = 0;
};

// Saddle-point game between a multiplicative-weights player on the
// constraint multipliers and a best-responding weighted logistic regression.
// Returns the uniform mixture of all best responses. Throws
// DegenerateSubgroupError if a subgroup is empty.
ExpgradResult train_expgrad(const LabeledDataset& ds, const ExpgradConfig& config = {});

// Signed moment gaps gamma_{y,s}(h) = E[h | Y=y, S=s] - E[h | Y=y] for the
// constrained labels, ordered (y, s) with y ascending; for hard or
// fractional predictions.
std::vector<double> moment_gaps(std::span<const double> predictions, const LabeledDataset& ds,
                                ExpgradConstraint constraint);

}  // namespace fairshift
