#include <gtest/gtest.h>

#include "fairshift/gaussian.hpp"
#include "fairshift/logistic.hpp"
#include "fairshift/metrics.hpp"

using namespace fairshift;

namespace {

LabeledDataset five_points() {
  FeatureMatrix x(5, 2);
  x << 0.5, -1.0, 1.5, 0.3, -0.7, 2.0, 2.2, -0.4, -1.1, -0.9;
  return LabeledDataset(x, {1, 1, 0, 1, 0}, {0, 1, 1, 0, 0}, {"a", "b"});
}

Eigen::VectorXd finite_difference(const WeightedLogLoss& f, const Eigen::VectorXd& theta) {
  const double h = 1e-6;
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd up = theta, dn = theta;
    up[k] += h;
    dn[k] -= h;
    g[k] = (f.value(up) - f.value(dn)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(WeightedLr, SeparableTwoPoints) {
  FeatureMatrix x(2, 1);
  x << -1.0, 1.0;
  const LabeledDataset ds(x, {0, 1}, {0, 0}, {"f"});
  const std::vector<double> w = {1.0, 1.0};
  const auto res = train_weighted_lr(ds, w);
  EXPECT_EQ(error_rate(confusion(res.scorer.predict(ds), ds)), 0.0);
}

TEST(WeightedLr, AllWeightOnOneClass) {
  const auto ds = five_points();
  const std::vector<double> w = {1.0, 1.0, 0.0, 1.0, 0.0};
  const auto pred = train_weighted_lr(ds, w).scorer.predict(ds);
  for (auto p : pred) EXPECT_EQ(p, 1);
}

TEST(WeightedLr, GradientMatchesFiniteDifferences) {
  const auto ds = five_points();
  const std::vector<double> w = {1.0, 0.5, 2.0, 1.0, 0.25};
  const auto a = design_matrix(ds.features(), ds.groups());
  const WeightedLogLoss f(a, ds.labels(), w, 1e-4);
  const auto res = train_weighted_lr(ds, w);
  Eigen::VectorXd at_opt(a.cols());
  at_opt << res.scorer.weights, res.scorer.intercept;
  for (const Eigen::VectorXd& theta :
       {at_opt, Eigen::VectorXd(Eigen::VectorXd::LinSpaced(a.cols(), -0.8, 1.1))}) {
    EXPECT_LT((f.gradient(theta) - finite_difference(f, theta)).cwiseAbs().maxCoeff(), 1e-6);
  }
  EXPECT_LT(f.gradient(at_opt).norm(), 1e-6);
}

TEST(WeightedLr, HessianMatchesGradientDifferences) {
  const auto ds = five_points();
  const std::vector<double> w(5, 1.0);
  const auto a = design_matrix(ds.features(), ds.groups());
  const WeightedLogLoss f(a, ds.labels(), w, 1e-3);
  const Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(a.cols(), 0.3, -0.6);
  const auto h = f.hessian(theta);
  const double eps = 1e-6;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd up = theta, dn = theta;
    up[k] += eps;
    dn[k] -= eps;
    const Eigen::VectorXd col = (f.gradient(up) - f.gradient(dn)) / (2 * eps);
    EXPECT_LT((h.col(k) - col).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(WeightedLr, ObjectiveNeverIncreases) {
  const auto data = materialize(SyntheticPreset::by_name("desk"), 3);
  std::vector<double> w(data.train.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + static_cast<double>(i % 3);
  LrConfig cfg;
  cfg.record_trace = true;
  const auto res = train_weighted_lr(data.train, w, cfg);
  ASSERT_GE(res.objective_trace.size(), 2u);
  for (std::size_t k = 1; k < res.objective_trace.size(); ++k) {
    EXPECT_LE(res.objective_trace[k], res.objective_trace[k - 1]);
  }
  EXPECT_TRUE(res.converged);
}

TEST(WeightedLr, WeightScaleInvariance) {
  const auto data = materialize(SyntheticPreset::by_name("desk"), 4);
  std::vector<double> w(data.train.size()), w7(data.train.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = 1.0 + static_cast<double>(i % 5) / 4.0;
    w7[i] = 7.0 * w[i];
  }
  const auto a = train_weighted_lr(data.train, w).scorer;
  const auto b = train_weighted_lr(data.train, w7).scorer;
  EXPECT_LT((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-8);
}

TEST(WeightedLr, DeterministicAndValidated) {
  const auto ds = five_points();
  const std::vector<double> w(5, 1.0);
  const auto a = train_weighted_lr(ds, w).scorer;
  const auto b = train_weighted_lr(ds, w).scorer;
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.intercept, b.intercept);
  EXPECT_THROW(train_weighted_lr(ds, std::vector<double>(5, 0.0)), std::invalid_argument);
  EXPECT_THROW(train_weighted_lr(ds, std::vector<double>{1, 1, -1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(train_weighted_lr(ds, std::vector<double>(4, 1.0)), std::invalid_argument);
}

TEST(LinearScorerTest, HalfThresholdIsArgmax) {
  LinearScorer sc;
  sc.weights = Eigen::Vector3d(0.7, -0.2, 0.4);
  sc.intercept = -0.1;
  const auto ds = five_points();
  const auto scores = sc.scores(ds);
  const auto pred = sc.predict(ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double z = sc.logit(ds.features().row(static_cast<Eigen::Index>(i)), ds.group(i));
    EXPECT_EQ(pred[i], z >= 0.0 ? 1 : 0);
    EXPECT_GT(scores[i], 0.0);
    EXPECT_LT(scores[i], 1.0);
  }
}
