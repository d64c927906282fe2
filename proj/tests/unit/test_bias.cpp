#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "fairshift/bias.hpp"
#include "fairshift/error.hpp"
#include "fairshift/report.hpp"
#include "fairshift/rng.hpp"
#include "helpers.hpp"

using namespace fairshift;
using fairshift::testing::dataset_with_counts;

namespace {

std::vector<std::vector<double>> rows_of_group(const LabeledDataset& ds, int s) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.group(i) != s) continue;
    const auto r = ds.features().row(static_cast<Eigen::Index>(i));
    std::vector<double> v(r.begin(), r.end());
    v.push_back(ds.label(i));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

TEST(UnderRepresentation, IdentityKeepsEverything) {
  const auto ds = dataset_with_counts({30, 20, 10, 40});
  EXPECT_TRUE(inject_under_representation(ds, 1.0, 1.0, 3) == ds);
}

TEST(UnderRepresentation, ExactCounts) {
  const auto ds = dataset_with_counts({300, 50, 200, 60});
  EXPECT_EQ(subgroup_stats(inject_under_representation(ds, 0.5, 1.0, 1)).counts[2], 100u);
  const auto out = subgroup_stats(inject_under_representation(ds, 0.2, 0.6, 1));
  EXPECT_EQ(out.counts, (PerSubgroup<std::size_t>{180, 50, 40, 60}));
}

TEST(UnderRepresentation, PrivilegedRowsUntouched) {
  const auto ds = dataset_with_counts({300, 50, 200, 60});
  const auto out = inject_under_representation(ds, 0.3, 0.7, 8);
  EXPECT_EQ(rows_of_group(out, 1), rows_of_group(ds, 1));
  // original relative order is kept
  for (Eigen::Index i = 1; i < out.features().rows(); ++i) {
    EXPECT_LT(out.features()(i - 1, 0), out.features()(i, 0));
  }
}

TEST(UnderRepresentation, EmptyRetentionThrows) {
  const auto ds = dataset_with_counts({10, 10, 2, 10});
  EXPECT_THROW(inject_under_representation(ds, 0.1, 1.0, 1), DegenerateSubgroupError);
}

TEST(UnderRepresentation, SymmetricBetaKeepsGroupZeroPosteriorRate) {
  const auto ds = dataset_with_counts({400, 100, 200, 100});
  const auto out = subgroup_stats(inject_under_representation(ds, 0.5, 0.5, 2));
  EXPECT_DOUBLE_EQ(static_cast<double>(out.counts[2]) / static_cast<double>(out.counts[0] + out.counts[2]),
                   200.0 / 600.0);
}

TEST(LabelBias, ZeroIsIdentity) {
  const auto ds = dataset_with_counts({10, 10, 10, 10});
  const auto r = inject_label_bias(ds, 0.0, 5);
  EXPECT_TRUE(r.dataset == ds);
  EXPECT_EQ(r.flipped, 0u);
}

TEST(LabelBias, FlipsExactCount) {
  const auto ds = dataset_with_counts({50, 40, 100, 30});
  const auto r = inject_label_bias(ds, 0.3, 5);
  EXPECT_EQ(r.flipped, 30u);
  EXPECT_EQ(r.dataset.size(), ds.size());
  const auto st = subgroup_stats(r.dataset);
  EXPECT_EQ(st.counts, (PerSubgroup<std::size_t>{80, 40, 70, 30}));
  EXPECT_EQ(r.dataset.features(), ds.features());
  EXPECT_TRUE(std::equal(r.dataset.groups().begin(), r.dataset.groups().end(), ds.groups().begin()));
}

TEST(LabelBias, RoundsSmallSubgroup) {
  const auto r = inject_label_bias(dataset_with_counts({5, 5, 7, 5}), 0.9, 1);
  EXPECT_EQ(r.flipped, 6u);
  EXPECT_EQ(subgroup_stats(r.dataset).counts[2], 1u);
  EXPECT_FALSE(r.exhausted);
}

TEST(LabelBias, ExhaustionFlaggedOrThrows) {
  const auto ds = dataset_with_counts({5, 5, 1, 5});
  EXPECT_TRUE(inject_label_bias(ds, 0.9, 1).exhausted);
  EXPECT_THROW(inject_label_bias(ds, 0.9, 1, true), DegenerateSubgroupError);
}

TEST(BiasSettingTest, Validation) {
  EXPECT_NO_THROW((BiasSetting{1.0, 1.0, 0.0}.validate()));
  EXPECT_TRUE((BiasSetting{}.is_identity()));
  EXPECT_THROW((BiasSetting{0.0, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((BiasSetting{1.0, 1.2, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((BiasSetting{1.0, 1.0, 1.0}.validate()), std::invalid_argument);
}

TEST(Grid, PaperDefaultSize) {
  const auto cells = enumerate_grid(BiasGrid::paper_default(3));
  EXPECT_EQ(cells.size(), 550u);
  EXPECT_EQ(std::count_if(cells.begin(), cells.end(), [](const GridCell& c) { return c.sweep == Sweep::kBeta; }), 500);
}

TEST(Grid, DeskSize) { EXPECT_EQ(enumerate_grid(BiasGrid::desk(1)).size(), 60u); }

TEST(Grid, SingleCell) {
  BiasGrid g;
  g.beta_pos_values = {1.0};
  g.beta_neg_values = {1.0};
  g.nu_values = {};
  g.runs = 1;
  const auto cells = enumerate_grid(g);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].setting.is_identity());
  EXPECT_EQ(cells[0].cell_seed, mix64(0, 0, 0, 0));
}

TEST(Grid, OrderAndSeeds) {
  const auto grid = BiasGrid::desk(77);
  const auto cells = enumerate_grid(grid);
  const auto again = enumerate_grid(grid);
  std::set<std::uint64_t> seeds;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    EXPECT_EQ(cells[k].cell_seed, again[k].cell_seed);
    seeds.insert(cells[k].cell_seed);
  }
  EXPECT_EQ(seeds.size(), cells.size());
  // run-major; beta_pos outer, beta_neg inner, then the nu sweep
  EXPECT_EQ(cells[0].run, 0);
  EXPECT_EQ(cells[1].setting, (BiasSetting{0.25, 0.5, 0.0}));
  EXPECT_EQ(cells[4].setting, (BiasSetting{0.5, 0.25, 0.0}));
  EXPECT_EQ(cells[16].sweep, Sweep::kLabel);
  EXPECT_EQ(cells[17].setting, (BiasSetting{1.0, 1.0, 0.3}));
  EXPECT_EQ(cells[17].cell_seed, mix64(77, 0, kLabelSweepSeedTag, 1));
  EXPECT_EQ(cells[20].run, 1);
  EXPECT_EQ(cells[21].cell_seed, mix64(77, 1, 0, 1));
}

TEST(Grid, ConfigFile) {
  const auto path = std::filesystem::temp_directory_path() / "fairshift_grid.cfg";
  write_text_file(path, "beta_pos = 0.5, 1\nruns = 2\n");
  const auto g = load_grid_config(path, BiasGrid::desk(4));
  EXPECT_EQ(g.beta_pos_values, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(g.beta_neg_values, BiasGrid::desk().beta_neg_values);
  EXPECT_EQ(g.runs, 2);
  EXPECT_EQ(enumerate_grid(g).size(), 2u * (8 + 4));
  std::filesystem::remove(path);
}

TEST(Mix64, PackingSeparatesIndices) {
  EXPECT_NE(mix64(1, 0, 1, 0), mix64(1, 0, 0, 1));
  EXPECT_NE(mix64(1, 1, 0, 0), mix64(1, 0, 1, 0));
  EXPECT_NE(mix64(1, 0, 0, 0), mix64(2, 0, 0, 0));
}
