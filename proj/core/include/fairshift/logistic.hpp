#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "fairshift/dataset.hpp"

namespace fairshift {

// eta_hat(x, s) = sigmoid(w . [x, s] + b). The group indicator is the last
// coefficient of `weights`.
struct LinearScorer {
  Eigen::VectorXd weights;
  double intercept = 0.0;

  double logit(const Eigen::Ref<const Eigen::RowVectorXd>& x, int s) const;
  double score(const Eigen::Ref<const Eigen::RowVectorXd>& x, int s) const;
  // Scores for every row of `ds`.
  std::vector<double> scores(const LabeledDataset& ds) const;
  // 1 iff score > threshold (ties to tie_break).
  std::vector<std::uint8_t> predict(const LabeledDataset& ds, double threshold = 0.5,
                                    int tie_break = 1) const;
};

struct LrConfig {
  double l2 = 1e-4;
  int max_iterations = 2000;
  double tolerance = 1e-8;
  bool record_trace = false;
};

struct LrResult {
  LinearScorer scorer;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  // Objective before each step and at the end (only when record_trace).
  std::vector<double> objective_trace;
};

// Rows [x_i, s_i, 1]; the final column carries the intercept.
Eigen::MatrixXd design_matrix(const FeatureMatrix& features, std::span<const std::uint8_t> groups);

// Normalized weighted log-loss plus an L2 penalty on the non-intercept
// coefficients:
//   J(theta) = sum_i (w_i / sum w) * logloss(sigmoid(a_i . theta), y_i) + l2/2 |w|^2
// Dividing by sum w makes the minimizer invariant to rescaling the weights.
class WeightedLogLoss {
 public:
  WeightedLogLoss(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels,
                  std::span<const double> sample_weights, double l2);

  double value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const;
  Eigen::Index parameters() const noexcept { return design_.cols(); }

 private:
  const Eigen::MatrixXd& design_;
  Eigen::VectorXd y_;
  Eigen::VectorXd w_;
  double l2_;
};

// Deterministic from a zero start. Each iteration takes a Newton direction
// with Armijo backtracking, so the objective never increases. Stops when the
// gradient norm drops below the tolerance or the Newton decrement falls below
// the floating-point resolution of the objective; otherwise returns the last
// iterate with converged = false.
LrResult train_weighted_lr(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels,
                           std::span<const double> sample_weights, const LrConfig& config = {});
LrResult train_weighted_lr(const LabeledDataset& ds, std::span<const double> sample_weights,
                           const LrConfig& config = {});

LinearScorer scorer_from_theta(const Eigen::VectorXd& theta);

}  // namespace fairshift
