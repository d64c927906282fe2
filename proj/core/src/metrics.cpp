#include "fairshift/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fairshift {

std::size_t ConfusionBySubgroup::total() const noexcept {
  std::size_t n = 0;
  for (std::size_t k = 0; k < 4; ++k) n += predicted_pos[k] + predicted_neg[k];
  return n;
}

MetricValue ConfusionBySubgroup::acceptance_rate(int s) const {
  const auto a = subgroup_index(0, s);
  const auto b = subgroup_index(1, s);
  const auto n = predicted_pos[a] + predicted_neg[a] + predicted_pos[b] + predicted_neg[b];
  if (n == 0) return std::nullopt;
  return static_cast<double>(predicted_pos[a] + predicted_pos[b]) / static_cast<double>(n);
}

MetricValue ConfusionBySubgroup::true_positive_rate(int s) const {
  const auto k = subgroup_index(1, s);
  const auto n = predicted_pos[k] + predicted_neg[k];
  if (n == 0) return std::nullopt;
  return static_cast<double>(predicted_pos[k]) / static_cast<double>(n);
}

ConfusionBySubgroup confusion(std::span<const std::uint8_t> preds,
                              std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> groups) {
  if (preds.size() != labels.size() || preds.size() != groups.size()) {
    throw std::invalid_argument("confusion: prediction count does not match dataset size");
  }
  ConfusionBySubgroup c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto k = subgroup_index(labels[i], groups[i]);
    if (preds[i]) {
      ++c.predicted_pos[k];
    } else {
      ++c.predicted_neg[k];
    }
  }
  return c;
}

ConfusionBySubgroup confusion(std::span<const std::uint8_t> preds, const LabeledDataset& ds) {
  return confusion(preds, ds.labels(), ds.groups());
}

double error_rate(const ConfusionBySubgroup& conf) {
  const auto n = conf.total();
  if (n == 0) return 0.0;
  // False positives sit in y = 0 subgroups, false negatives in y = 1.
  const auto wrong = conf.predicted_pos[0] + conf.predicted_pos[1] +
                     conf.predicted_neg[2] + conf.predicted_neg[3];
  return static_cast<double>(wrong) / static_cast<double>(n);
}

MetricValue spd(const ConfusionBySubgroup& conf) {
  const auto a1 = conf.acceptance_rate(1);
  const auto a0 = conf.acceptance_rate(0);
  if (!a1 || !a0) return std::nullopt;
  return std::abs(*a1 - *a0);
}

MetricValue eod(const ConfusionBySubgroup& conf) {
  const auto t1 = conf.true_positive_rate(1);
  const auto t0 = conf.true_positive_rate(0);
  if (!t1 || !t0) return std::nullopt;
  return std::abs(*t1 - *t0);
}

}  // namespace fairshift
