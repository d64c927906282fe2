#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "fairshift/dataset.hpp"

namespace fairshift {

// A metric that may be undefined (an empty group or positive cell).
using MetricValue = std::optional<double>;

// Predicted-1 and predicted-0 counts for each (y, s) subgroup.
struct ConfusionBySubgroup {
  PerSubgroup<std::size_t> predicted_pos{};
  PerSubgroup<std::size_t> predicted_neg{};

  std::size_t total() const noexcept;
  std::size_t count(int y, int s) const {
    const auto k = subgroup_index(y, s);
    return predicted_pos[k] + predicted_neg[k];
  }
  // P(Yhat = 1 | S = s)
  MetricValue acceptance_rate(int s) const;
  // P(Yhat = 1 | Y = 1, S = s)
  MetricValue true_positive_rate(int s) const;
};

ConfusionBySubgroup confusion(std::span<const std::uint8_t> preds, const LabeledDataset& ds);
ConfusionBySubgroup confusion(std::span<const std::uint8_t> preds,
                              std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> groups);

double error_rate(const ConfusionBySubgroup& conf);
// |P(Yhat=1 | S=1) - P(Yhat=1 | S=0)|
MetricValue spd(const ConfusionBySubgroup& conf);
// |P(Yhat=1 | Y=1, S=1) - P(Yhat=1 | Y=1, S=0)|
MetricValue eod(const ConfusionBySubgroup& conf);

}  // namespace fairshift
