#include "fairshift/expgrad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fairshift/error.hpp"
#include "fairshift/rng.hpp"

namespace fairshift {

void RandomizedClassifier::validate() const {
  if (components.empty() || components.size() != weights.size()) {
    throw std::invalid_argument("RandomizedClassifier: components and weights differ in size");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("RandomizedClassifier: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("RandomizedClassifier: weights must sum to 1");
}

std::vector<double> RandomizedClassifier::positive_probability(const LabeledDataset& ds) const {
  std::vector<double> p(ds.size(), 0.0);
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto pred = components[k].predict(ds, threshold);
    for (std::size_t i = 0; i < ds.size(); ++i) p[i] += weights[k] * pred[i];
  }
  return p;
}

std::vector<std::uint8_t> RandomizedClassifier::predict(const LabeledDataset& ds,
                                                        std::uint64_t seed) const {
  std::vector<std::vector<std::uint8_t>> preds;
  preds.reserve(components.size());
  for (const auto& c : components) preds.push_back(c.predict(ds, threshold));
  Rng rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<std::uint8_t> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out[i] = preds[pick(rng)][i];
  return out;
}

namespace {

std::vector<int> constrained_labels(ExpgradConstraint c) {
  return c == ExpgradConstraint::kEqualizedOdds ? std::vector<int>{0, 1} : std::vector<int>{1};
}

}  // namespace

std::vector<double> moment_gaps(std::span<const double> predictions, const LabeledDataset& ds,
                                ExpgradConstraint constraint) {
  if (predictions.size() != ds.size()) throw std::invalid_argument("moment_gaps: size mismatch");
  PerSubgroup<double> sum{};
  PerSubgroup<double> cnt{};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    sum[ds.subgroup_of(i)] += predictions[i];
    cnt[ds.subgroup_of(i)] += 1.0;
  }
  std::vector<double> gaps;
  for (int y : constrained_labels(constraint)) {
    const auto a = subgroup_index(y, 0);
    const auto b = subgroup_index(y, 1);
    const double label_mean = (sum[a] + sum[b]) / (cnt[a] + cnt[b]);
    for (int s = 0; s < 2; ++s) {
      const auto k = subgroup_index(y, s);
      gaps.push_back(sum[k] / cnt[k] - label_mean);
    }
  }
  return gaps;
}

ExpgradResult train_expgrad(const LabeledDataset& ds, const ExpgradConfig& config) {
  if (config.iterations < 1) throw std::invalid_argument("expgrad: iterations must be positive");
  const auto stats = subgroup_stats(ds);
  if (stats.degenerate) throw DegenerateSubgroupError("expgrad: empty subgroup");

  const auto labels_c = constrained_labels(config.constraint);
  const std::size_t n_moments = labels_c.size() * 2;
  const std::size_t n_constraints = 2 * n_moments;  // +gamma and -gamma
  const auto n = ds.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  PerSubgroup<double> inv_cnt{};
  for (std::size_t k = 0; k < 4; ++k) inv_cnt[k] = 1.0 / static_cast<double>(stats.counts[k]);
  const std::array<double, 2> inv_label_cnt = {
      1.0 / static_cast<double>(stats.counts[0] + stats.counts[1]),
      1.0 / static_cast<double>(stats.counts[2] + stats.counts[3])};

  const auto design = design_matrix(ds.features(), ds.groups());
  std::vector<double> theta(n_constraints, 0.0);
  if (!config.initial_theta.empty()) {
    if (config.initial_theta.size() != n_constraints) {
      throw std::invalid_argument("expgrad: initial_theta has the wrong size");
    }
    theta = config.initial_theta;
  }

  ExpgradResult res;
  std::vector<double> gap_sum(n_moments, 0.0);
  std::vector<std::uint8_t> relabel(n);
  std::vector<double> cost_weight(n);
  std::vector<double> hard(n);

  for (int t = 1; t <= config.iterations; ++t) {
    // Multipliers on the scaled simplex {lambda >= 0, |lambda|_1 <= B}.
    const double max_theta = *std::max_element(theta.begin(), theta.end());
    const double shift = std::max(0.0, max_theta);
    double denom = std::exp(-shift);
    for (double th : theta) denom += std::exp(th - shift);
    std::vector<double> mu(n_moments);
    for (std::size_t m = 0; m < n_moments; ++m) {
      const double plus = config.multiplier_bound * std::exp(theta[2 * m] - shift) / denom;
      const double minus = config.multiplier_bound * std::exp(theta[2 * m + 1] - shift) / denom;
      mu[m] = plus - minus;
    }

    // Cost of predicting 1 minus cost of predicting 0, per row.
    for (std::size_t i = 0; i < n; ++i) {
      const int y = ds.label(i);
      const int s = ds.group(i);
      double delta = (y == 0 ? 1.0 : -1.0) * inv_n;
      for (std::size_t li = 0; li < labels_c.size(); ++li) {
        if (labels_c[li] != y) continue;
        for (int sp = 0; sp < 2; ++sp) {
          const double own = (s == sp) ? inv_cnt[subgroup_index(y, sp)] : 0.0;
          delta += mu[2 * li + static_cast<std::size_t>(sp)] * (own - inv_label_cnt[static_cast<std::size_t>(y)]);
        }
      }
      relabel[i] = delta < 0.0 ? 1 : 0;
      cost_weight[i] = std::abs(delta);
    }
    if (std::all_of(cost_weight.begin(), cost_weight.end(), [](double w) { return w == 0.0; })) {
      std::fill(cost_weight.begin(), cost_weight.end(), 1.0);
    }

    auto fit = train_weighted_lr(design, relabel, cost_weight, config.lr);
    const auto pred = fit.scorer.predict(ds, 0.5);
    for (std::size_t i = 0; i < n; ++i) hard[i] = pred[i];
    const auto gaps = moment_gaps(hard, ds, config.constraint);
    res.classifier.components.push_back(std::move(fit.scorer));
    res.iterations = t;

    const double step = config.learning_rate / std::sqrt(static_cast<double>(t));
    for (std::size_t m = 0; m < n_moments; ++m) {
      gap_sum[m] += gaps[m];
      theta[2 * m] += step * (gaps[m] - config.eps);
      theta[2 * m + 1] += step * (-gaps[m] - config.eps);
    }
  }

  const auto t_total = static_cast<double>(res.classifier.components.size());
  res.classifier.weights.assign(res.classifier.components.size(), 1.0 / t_total);
  res.max_violation = -config.eps;
  for (double g : gap_sum) {
    res.max_violation = std::max(res.max_violation, std::abs(g / t_total) - config.eps);
  }
  res.within_tolerance = res.max_violation <= 0.0;
  return res;
}

}  // namespace fairshift
