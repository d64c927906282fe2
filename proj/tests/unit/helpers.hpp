#pragma once

#include <initializer_list>
#include <vector>

#include "fairshift/dataset.hpp"

namespace fairshift::testing {

// Dataset with the given (y, s) subgroup sizes, ordered (0,0),(0,1),(1,0),(1,1).
// Feature 0 is the row index, feature 1 a deterministic wobble.
inline LabeledDataset dataset_with_counts(const PerSubgroup<std::size_t>& counts) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<std::uint8_t> y, s;
  std::size_t row = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < counts[k]; ++i, ++row) {
      x(static_cast<Eigen::Index>(row), 0) = static_cast<double>(row);
      x(static_cast<Eigen::Index>(row), 1) = static_cast<double>((row * 7) % 11) - 5.0;
      y.push_back(static_cast<std::uint8_t>(subgroup_label(k)));
      s.push_back(static_cast<std::uint8_t>(subgroup_group(k)));
    }
  }
  return LabeledDataset(std::move(x), std::move(y), std::move(s), {"idx", "wobble"});
}

// One-feature dataset from explicit label and group columns.
inline LabeledDataset dataset_from(std::initializer_list<int> labels, std::initializer_list<int> groups) {
  std::vector<std::uint8_t> y(labels.begin(), labels.end());
  std::vector<std::uint8_t> s(groups.begin(), groups.end());
  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(y.size()), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = static_cast<double>(i);
  return LabeledDataset(std::move(x), std::move(y), std::move(s), {"f"});
}

}  // namespace fairshift::testing
