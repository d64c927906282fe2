#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fairshift {

using FeatureMatrix = Eigen::MatrixXd;

// Subgroups are addressed by (y, s) and stored in arrays ordered
// (0,0), (0,1), (1,0), (1,1).
constexpr std::size_t subgroup_index(int y, int s) noexcept {
  return static_cast<std::size_t>(2 * y + s);
}
constexpr int subgroup_label(std::size_t idx) noexcept { return static_cast<int>(idx / 2); }
constexpr int subgroup_group(std::size_t idx) noexcept { return static_cast<int>(idx % 2); }

template <typename T>
using PerSubgroup = std::array<T, 4>;

// Feature rows with a binary label y and a binary sensitive attribute s per
// row. s = 0 is the underprivileged group, y = 1 the favorable label.
// Immutable after construction; the constructor enforces the invariants.
class LabeledDataset {
 public:
  LabeledDataset(FeatureMatrix features, std::vector<std::uint8_t> labels,
                 std::vector<std::uint8_t> groups,
                 std::vector<std::string> feature_names);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  const FeatureMatrix& features() const noexcept { return features_; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::span<const std::uint8_t> groups() const noexcept { return groups_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  int label(std::size_t row) const { return labels_[row]; }
  int group(std::size_t row) const { return groups_[row]; }
  std::size_t subgroup_of(std::size_t row) const {
    return subgroup_index(labels_[row], groups_[row]);
  }

  // Rows in the given order. Indices must be valid and the result nonempty.
  LabeledDataset select_rows(std::span<const std::size_t> rows) const;

  // Same rows and features, replaced labels.
  LabeledDataset with_labels(std::vector<std::uint8_t> labels) const;

  // Row indices of each (y, s) subgroup, ascending.
  PerSubgroup<std::vector<std::size_t>> subgroup_rows() const;

  friend bool operator==(const LabeledDataset& a, const LabeledDataset& b);

 private:
  FeatureMatrix features_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint8_t> groups_;
  std::vector<std::string> feature_names_;
};

struct SubgroupStats {
  PerSubgroup<std::size_t> counts{};
  PerSubgroup<double> probs{};
  // min_ys p_ys / max_ys p_ys; 0 when some subgroup is empty.
  double imbalance_alpha = 0.0;
  bool degenerate = false;

  std::size_t total() const noexcept {
    return counts[0] + counts[1] + counts[2] + counts[3];
  }
};

SubgroupStats subgroup_stats(const LabeledDataset& ds);
SubgroupStats subgroup_stats_from_counts(const PerSubgroup<std::size_t>& counts);

struct Split {
  LabeledDataset train;
  LabeledDataset test;
};

// Per subgroup, round(test_fraction * n_ys) rows go to test, drawn without
// replacement. Both outputs keep the original relative row order.
// Throws DegenerateSubgroupError if a subgroup has fewer than two rows or
// would leave train empty.
Split stratified_split(const LabeledDataset& ds, double test_fraction,
                       std::uint64_t seed);

// FNV-1a over the label, group and feature bytes. Used as the dataset
// identity in manifests and for the test-set-untouched invariant.
std::uint64_t fingerprint(const LabeledDataset& ds);

// Dataset CSV: one column per feature, then `y` and `s`. Values are written
// with round-trip precision.
void write_dataset_csv(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace fairshift
