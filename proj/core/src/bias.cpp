#include "fairshift/bias.hpp"

#include <cmath>
#include <stdexcept>

#include "fairshift/error.hpp"
#include "fairshift/kv_config.hpp"
#include "fairshift/rng.hpp"

namespace fairshift {

void BiasSetting::validate() const {
  if (!(beta_pos > 0.0 && beta_pos <= 1.0)) throw std::invalid_argument("beta_pos must lie in (0, 1]");
  if (!(beta_neg > 0.0 && beta_neg <= 1.0)) throw std::invalid_argument("beta_neg must lie in (0, 1]");
  if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in [0, 1)");
}

void BiasGrid::validate() const {
  for (double b : beta_pos_values) BiasSetting{b, 1.0, 0.0}.validate();
  for (double b : beta_neg_values) BiasSetting{1.0, b, 0.0}.validate();
  for (double v : nu_values) BiasSetting{1.0, 1.0, v}.validate();
  if (runs < 1) throw std::invalid_argument("runs must be positive");
  if (beta_pos_values.empty() != beta_neg_values.empty()) {
    throw std::invalid_argument("beta_pos and beta_neg lists must both be empty or both nonempty");
  }
}

BiasGrid BiasGrid::paper_default(std::uint64_t master_seed) {
  BiasGrid g;
  for (int k = 1; k <= 10; ++k) {
    g.beta_pos_values.push_back(k / 10.0);
    g.beta_neg_values.push_back(k / 10.0);
    g.nu_values.push_back((k - 1) / 10.0);
  }
  g.runs = 5;
  g.master_seed = master_seed;
  return g;
}

BiasGrid BiasGrid::desk(std::uint64_t master_seed) {
  BiasGrid g;
  g.beta_pos_values = {0.25, 0.5, 0.75, 1.0};
  g.beta_neg_values = {0.25, 0.5, 0.75, 1.0};
  g.nu_values = {0.0, 0.3, 0.6, 0.9};
  g.runs = 3;
  g.master_seed = master_seed;
  return g;
}

BiasGrid load_grid_config(const std::filesystem::path& path, BiasGrid base) {
  const auto cfg = KvConfig::load(path);
  if (auto v = cfg.get("beta_pos")) base.beta_pos_values = parse_double_list(*v);
  if (auto v = cfg.get("beta_neg")) base.beta_neg_values = parse_double_list(*v);
  if (auto v = cfg.get("nu")) base.nu_values = parse_double_list(*v);
  if (auto v = cfg.get("runs")) base.runs = std::stoi(*v);
  if (auto v = cfg.get("master_seed")) base.master_seed = std::stoull(*v);
  base.validate();
  return base;
}

std::string to_string(Sweep sweep) { return sweep == Sweep::kBeta ? "beta" : "label"; }

Sweep sweep_from_string(const std::string& s) {
  if (s == "beta") return Sweep::kBeta;
  if (s == "label") return Sweep::kLabel;
  throw InputError("unknown sweep: " + s);
}

std::vector<GridCell> enumerate_grid(const BiasGrid& grid) {
  grid.validate();
  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(grid.runs) *
                (grid.beta_pos_values.size() * grid.beta_neg_values.size() +
                 grid.nu_values.size()));
  for (int run = 0; run < grid.runs; ++run) {
    const auto r = static_cast<std::uint64_t>(run);
    for (std::size_t i = 0; i < grid.beta_pos_values.size(); ++i) {
      for (std::size_t j = 0; j < grid.beta_neg_values.size(); ++j) {
        cells.push_back(GridCell{run, Sweep::kBeta, i, j,
                                 BiasSetting{grid.beta_pos_values[i], grid.beta_neg_values[j], 0.0},
                                 mix64(grid.master_seed, r, i, j)});
      }
    }
    for (std::size_t k = 0; k < grid.nu_values.size(); ++k) {
      cells.push_back(GridCell{run, Sweep::kLabel, k, 0,
                               BiasSetting{1.0, 1.0, grid.nu_values[k]},
                               mix64(grid.master_seed, r, kLabelSweepSeedTag, k)});
    }
  }
  return cells;
}

LabeledDataset inject_under_representation(const LabeledDataset& ds, double beta_pos,
                                           double beta_neg, std::uint64_t seed) {
  BiasSetting{beta_pos, beta_neg, 0.0}.validate();
  if (beta_pos == 1.0 && beta_neg == 1.0) return ds;

  Rng rng(seed);
  const auto groups = ds.subgroup_rows();
  std::vector<std::uint8_t> keep(ds.size(), 1);
  auto thin = [&](std::size_t sub, double beta, const char* name) {
    const auto& rows = groups[sub];
    if (rows.empty()) {
      throw DegenerateSubgroupError(std::string("inject_under_representation: empty ") + name +
                                    " subgroup");
    }
    const auto retained = exact_count(beta, rows.size());
    if (retained == 0) {
      throw DegenerateSubgroupError(std::string("inject_under_representation: ") + name +
                                    " subgroup would retain zero rows");
    }
    for (auto r : rows) keep[r] = 0;
    for (auto pick : choose_without_replacement(rows.size(), retained, rng)) keep[rows[pick]] = 1;
  };
  // Fixed draw order: (1,0) first, then (0,0).
  thin(subgroup_index(1, 0), beta_pos, "(y=1, s=0)");
  thin(subgroup_index(0, 0), beta_neg, "(y=0, s=0)");

  std::vector<std::size_t> rows;
  rows.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (keep[i]) rows.push_back(i);
  }
  return ds.select_rows(rows);
}

LabelBiasResult inject_label_bias(const LabeledDataset& ds, double nu, std::uint64_t seed,
                                  bool strict) {
  BiasSetting{1.0, 1.0, nu}.validate();
  const auto positives = ds.subgroup_rows()[subgroup_index(1, 0)];
  if (positives.empty()) {
    throw DegenerateSubgroupError("inject_label_bias: empty (y=1, s=0) subgroup");
  }
  if (nu == 0.0) return LabelBiasResult{ds, 0, false};

  Rng rng(seed);
  const auto n_flip = exact_count(nu, positives.size());
  std::vector<std::uint8_t> labels(ds.labels().begin(), ds.labels().end());
  for (auto pick : choose_without_replacement(positives.size(), n_flip, rng)) {
    labels[positives[pick]] = 0;
  }
  const bool exhausted = n_flip >= positives.size();
  if (exhausted && strict) {
    throw DegenerateSubgroupError("inject_label_bias: flipping leaves no (y=1, s=0) rows");
  }
  return LabelBiasResult{ds.with_labels(std::move(labels)), n_flip, exhausted};
}

LabeledDataset apply_bias(const LabeledDataset& ds, const BiasSetting& setting,
                          std::uint64_t seed, bool* label_exhausted) {
  setting.validate();
  auto thinned = inject_under_representation(ds, setting.beta_pos, setting.beta_neg,
                                             splitmix64(seed ^ 0x5ca1ab1eULL));
  auto flipped = inject_label_bias(thinned, setting.nu, splitmix64(seed ^ 0xf11bULL));
  if (label_exhausted) *label_exhausted = flipped.exhausted;
  return std::move(flipped.dataset);
}

}  // namespace fairshift
