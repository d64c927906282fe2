#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairshift/dataset.hpp"

namespace fairshift {

// One cell of the bias grid: retention probabilities for the (y=1, s=0) and
// (y=0, s=0) subgroups and the label-flip proportion for (y=1, s=0).
struct BiasSetting {
  double beta_pos = 1.0;
  double beta_neg = 1.0;
  double nu = 0.0;

  bool is_identity() const noexcept {
    return beta_pos == 1.0 && beta_neg == 1.0 && nu == 0.0;
  }
  void validate() const;

  friend bool operator==(const BiasSetting&, const BiasSetting&) = default;
};

struct BiasGrid {
  std::vector<double> beta_pos_values;
  std::vector<double> beta_neg_values;
  std::vector<double> nu_values;
  int runs = 5;
  std::uint64_t master_seed = 0;

  void validate() const;

  // beta in {0.1, ..., 1.0} on both axes, nu in {0.0, ..., 0.9}, 5 runs.
  static BiasGrid paper_default(std::uint64_t master_seed = 0);
  // beta in {0.25, 0.5, 0.75, 1.0} on both axes, nu in {0, 0.3, 0.6, 0.9}, 3 runs.
  static BiasGrid desk(std::uint64_t master_seed = 0);
};

// Keys: beta_pos, beta_neg, nu (comma-separated lists), runs, master_seed.
// Missing keys keep the values already in `base`.
BiasGrid load_grid_config(const std::filesystem::path& path, BiasGrid base);

enum class Sweep { kBeta, kLabel };

std::string to_string(Sweep sweep);
Sweep sweep_from_string(const std::string& s);

struct GridCell {
  int run = 0;
  Sweep sweep = Sweep::kBeta;
  // Positions of the setting in the grid lists: (beta_pos, beta_neg) for the
  // beta sweep, (nu, 0) for the label sweep.
  std::size_t i = 0;
  std::size_t j = 0;
  BiasSetting setting;
  std::uint64_t cell_seed = 0;
};

// Sentinel first index used when deriving seeds for label-sweep cells, so
// they never collide with beta-sweep cells.
inline constexpr std::uint64_t kLabelSweepSeedTag = (1ULL << 21) - 1;

// Run-major. Within a run: the beta_pos x beta_neg cross product with nu = 0
// (beta_pos outer), then the nu list with beta_pos = beta_neg = 1.
std::vector<GridCell> enumerate_grid(const BiasGrid& grid);

// Keeps exactly round(beta_pos * n_10) rows of (y=1, s=0) and
// round(beta_neg * n_00) rows of (y=0, s=0), chosen uniformly without
// replacement; every s = 1 row is kept. Rows stay in original order.
// Throws DegenerateSubgroupError if a retained subgroup would be empty.
LabeledDataset inject_under_representation(const LabeledDataset& ds, double beta_pos,
                                           double beta_neg, std::uint64_t seed);

struct LabelBiasResult {
  LabeledDataset dataset;
  std::size_t flipped = 0;
  // True when no (y=1, s=0) rows remain after flipping.
  bool exhausted = false;
};

// Sets y = 0 on exactly round(nu * n_10) rows of (y=1, s=0). In strict mode
// an exhausted positive subgroup throws DegenerateSubgroupError instead of
// being flagged.
LabelBiasResult inject_label_bias(const LabeledDataset& ds, double nu, std::uint64_t seed,
                                  bool strict = false);

// Both injections in sequence (under-representation first) with independent
// sub-seeds derived from `seed`.
LabeledDataset apply_bias(const LabeledDataset& ds, const BiasSetting& setting,
                          std::uint64_t seed, bool* label_exhausted = nullptr);

}  // namespace fairshift
