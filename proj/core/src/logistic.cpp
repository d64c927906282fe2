#include "fairshift/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairshift {

namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double LinearScorer::logit(const Eigen::Ref<const Eigen::RowVectorXd>& x, int s) const {
  const auto d = x.size();
  if (weights.size() != d + 1) throw std::invalid_argument("LinearScorer: feature dimension mismatch");
  return x.dot(weights.head(d).transpose()) + weights[d] * s + intercept;
}

double LinearScorer::score(const Eigen::Ref<const Eigen::RowVectorXd>& x, int s) const {
  return sigmoid(logit(x, s));
}

std::vector<double> LinearScorer::scores(const LabeledDataset& ds) const {
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out[i] = score(ds.features().row(static_cast<Eigen::Index>(i)), ds.group(i));
  }
  return out;
}

std::vector<std::uint8_t> LinearScorer::predict(const LabeledDataset& ds, double threshold,
                                                int tie_break) const {
  std::vector<std::uint8_t> out(ds.size());
  const auto sc = scores(ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out[i] = sc[i] > threshold ? 1 : (sc[i] == threshold ? static_cast<std::uint8_t>(tie_break) : 0);
  }
  return out;
}

Eigen::MatrixXd design_matrix(const FeatureMatrix& features, std::span<const std::uint8_t> groups) {
  const auto n = features.rows();
  const auto d = features.cols();
  if (static_cast<std::size_t>(n) != groups.size()) {
    throw std::invalid_argument("design_matrix: row count mismatch");
  }
  Eigen::MatrixXd a(n, d + 2);
  a.leftCols(d) = features;
  for (Eigen::Index i = 0; i < n; ++i) a(i, d) = groups[static_cast<std::size_t>(i)];
  a.col(d + 1).setOnes();
  return a;
}

WeightedLogLoss::WeightedLogLoss(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels,
                                 std::span<const double> sample_weights, double l2)
    : design_(design), l2_(l2) {
  const auto n = static_cast<std::size_t>(design.rows());
  if (labels.size() != n || sample_weights.size() != n) {
    throw std::invalid_argument("WeightedLogLoss: size mismatch");
  }
  double total = 0.0;
  for (double w : sample_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("sample weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample weights are all zero");
  y_.resize(static_cast<Eigen::Index>(n));
  w_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    y_[static_cast<Eigen::Index>(i)] = labels[i];
    w_[static_cast<Eigen::Index>(i)] = sample_weights[i] / total;
  }
}

double WeightedLogLoss::value(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd z = design_ * theta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += w_[i] * (y_[i] > 0.5 ? softplus(-z[i]) : softplus(z[i]));
  }
  const auto k = theta.size() - 1;
  return loss + 0.5 * l2_ * theta.head(k).squaredNorm();
}

Eigen::VectorXd WeightedLogLoss::gradient(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd z = design_ * theta;
  Eigen::VectorXd r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = w_[i] * (sigmoid(z[i]) - y_[i]);
  Eigen::VectorXd g = design_.transpose() * r;
  const auto k = theta.size() - 1;
  g.head(k) += l2_ * theta.head(k);
  return g;
}

Eigen::MatrixXd WeightedLogLoss::hessian(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd z = design_ * theta;
  Eigen::VectorXd c(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z[i]);
    c[i] = w_[i] * p * (1.0 - p);
  }
  Eigen::MatrixXd h = design_.transpose() * c.asDiagonal() * design_;
  const auto k = theta.size() - 1;
  h.diagonal().head(k).array() += l2_;
  return h;
}

LinearScorer scorer_from_theta(const Eigen::VectorXd& theta) {
  LinearScorer sc;
  const auto k = theta.size() - 1;
  sc.weights = theta.head(k);
  sc.intercept = theta[k];
  return sc;
}

LrResult train_weighted_lr(const Eigen::MatrixXd& design, std::span<const std::uint8_t> labels,
                           std::span<const double> sample_weights, const LrConfig& config) {
  const WeightedLogLoss objective(design, labels, sample_weights, config.l2);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(objective.parameters());
  double f = objective.value(theta);
  LrResult res;
  if (config.record_trace) res.objective_trace.push_back(f);

  constexpr double kArmijo = 1e-4;
  for (int it = 0; it < config.max_iterations; ++it) {
    const Eigen::VectorXd g = objective.gradient(theta);
    res.gradient_norm = g.norm();
    if (res.gradient_norm < config.tolerance) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd h = objective.hessian(theta);
    // The intercept column is unpenalized; a tiny ridge keeps the solve
    // well-posed when every weighted row is saturated.
    h.diagonal().array() += 1e-12;
    Eigen::VectorXd step = h.ldlt().solve(-g);
    double slope = g.dot(step);
    if (!step.allFinite() || slope >= 0.0) {
      step = -g;
      slope = -g.squaredNorm();
    } else if (-0.5 * slope <= 1e-15 * std::max(1.0, std::abs(f))) {
      // Newton decrement below the resolution of the objective.
      res.converged = true;
      break;
    }
    double t = 1.0;
    double f_new = objective.value(theta + t * step);
    bool accepted = f_new <= f + kArmijo * t * slope;
    while (!accepted && t > 1e-12) {
      t *= 0.5;
      f_new = objective.value(theta + t * step);
      accepted = f_new <= f + kArmijo * t * slope;
    }
    // No sufficient decrease left at machine precision.
    if (!accepted || !(f_new <= f)) break;
    theta += t * step;
    f = f_new;
    res.iterations = it + 1;
    if (config.record_trace) res.objective_trace.push_back(f);
  }
  if (!res.converged) {
    res.gradient_norm = objective.gradient(theta).norm();
    res.converged = res.gradient_norm < config.tolerance;
  }
  res.scorer = scorer_from_theta(theta);
  return res;
}

LrResult train_weighted_lr(const LabeledDataset& ds, std::span<const double> sample_weights,
                           const LrConfig& config) {
  const auto a = design_matrix(ds.features(), ds.groups());
  return train_weighted_lr(a, ds.labels(), sample_weights, config);
}

}  // namespace fairshift
