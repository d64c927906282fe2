#include <gtest/gtest.h>

#include <filesystem>

#include "fairshift/error.hpp"
#include "fairshift/kv_config.hpp"
#include "fairshift/preprocess.hpp"

using namespace fairshift;

namespace {

const std::filesystem::path kData = FAIRSHIFT_TEST_DATA;
const std::filesystem::path kConfigs = FAIRSHIFT_CONFIG_DIR;

PreprocessSpec tiny_spec() {
  PreprocessSpec spec;
  spec.label_column = "y";
  spec.positive_labels = {"good"};
  spec.sensitive_column = "g";
  spec.underprivileged_values = {"a"};
  spec.categorical_columns = {"color"};
  spec.numeric_columns = {"v"};
  return spec;
}

}  // namespace

TEST(KvConfigTest, ParsesCommentsListsAndOverrides) {
  const auto cfg = KvConfig::parse("# top\nruns = 3\nbeta_pos = 0.1, 0.2 ,0.3\nruns=4  # later wins\n");
  EXPECT_EQ(cfg.get("runs").value(), "4");
  EXPECT_EQ(parse_double_list(cfg.get("beta_pos").value()), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_FALSE(cfg.contains("nu"));
}

TEST(CsvTableTest, QuotedFieldsAndRaggedRows) {
  const auto t = parse_csv_table("a,b\n\"x, y\",2\n");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "x, y");
  EXPECT_THROW(parse_csv_table("a,b\n1\n"), InputError);
  EXPECT_THROW(parse_csv_table("a,b\n"), InputError);
}

TEST(Preprocess, OneHotHasOneColumnPerValue) {
  const auto table = parse_csv_table(
      "color,v,g,y\nred,1,a,good\ngreen,2,b,bad\nblue,3,a,bad\nred,4,b,good\n");
  const auto out = preprocess_table(table, tiny_spec());
  const auto& ds = out.dataset;
  EXPECT_EQ(ds.size(), 4u);
  // three indicators plus one numeric column
  EXPECT_EQ(ds.dim(), 4u);
  for (Eigen::Index i = 0; i < 4; ++i) {
    double ones = 0.0;
    for (Eigen::Index c = 0; c < 3; ++c) ones += ds.features()(i, c);
    EXPECT_EQ(ones, 1.0);
  }
  EXPECT_EQ(std::vector<int>(ds.labels().begin(), ds.labels().end()), (std::vector<int>{1, 0, 0, 1}));
  EXPECT_EQ(std::vector<int>(ds.groups().begin(), ds.groups().end()), (std::vector<int>{0, 1, 0, 1}));
  ASSERT_EQ(out.numeric_indices.size(), 1u);
  const auto col = ds.features().col(static_cast<Eigen::Index>(out.numeric_indices[0]));
  EXPECT_NEAR(col.mean(), 0.0, 1e-12);
}

TEST(Preprocess, Errors) {
  const auto spec = tiny_spec();
  EXPECT_THROW(preprocess_table(parse_csv_table("color,v,g\nred,1,a\n"), spec), InputError);
  EXPECT_THROW(preprocess_table(parse_csv_table("color,v,g,y\nred,x,a,good\n"), spec), InputError);
  auto strict = spec;
  strict.negative_labels = {"bad"};
  EXPECT_THROW(preprocess_table(parse_csv_table("color,v,g,y\nred,1,a,meh\n"), strict), InputError);
  EXPECT_THROW(preprocess_table(parse_csv_table("color,v,g,y,extra\nred,1,a,good,9\n"), spec), InputError);
}

TEST(Preprocess, NumericGroupRule) {
  auto spec = tiny_spec();
  spec.underprivileged_values = {"<=25"};
  const auto table = parse_csv_table("color,v,g,y\nred,1,25,good\nred,2,26,bad\nred,3,18,bad\n");
  const auto ds = preprocess_table(table, spec).dataset;
  EXPECT_EQ(std::vector<int>(ds.groups().begin(), ds.groups().end()), (std::vector<int>{0, 1, 0}));
}

TEST(Preprocess, SuppliedScalingIsReused) {
  const auto spec = tiny_spec();
  const auto train = preprocess_table(parse_csv_table("color,v,g,y\nred,0,a,good\nred,10,b,bad\n"), spec);
  LoadOptions opts;
  opts.scaling = train.scaling;
  const auto test = preprocess_table(parse_csv_table("color,v,g,y\nred,5,a,good\n"), spec, opts);
  EXPECT_NEAR(test.dataset.features()(0, static_cast<Eigen::Index>(test.numeric_indices[0])), 0.0, 1e-12);
}

TEST(Preprocess, AdultSpecOnFixture) {
  const auto spec = load_preprocess_spec(kConfigs / "adult.spec");
  EXPECT_EQ(spec.dropped_columns, (std::vector<std::string>{"fnlwgt", "education-num", "race"}));
  const auto loaded = load_csv(kData / "adult_tiny.csv", spec);
  EXPECT_EQ(loaded.dataset.size(), 240u);
  for (const auto& name : loaded.dataset.feature_names()) {
    EXPECT_EQ(name.find("fnlwgt"), std::string::npos);
    EXPECT_EQ(name.find("race"), std::string::npos);
  }
  std::size_t positives = 0;
  for (auto y : loaded.dataset.labels()) positives += y;
  EXPECT_EQ(positives, 138u);
}

TEST(Preprocess, ReserializationIsIdempotent) {
  const auto spec = load_preprocess_spec(kConfigs / "adult.spec");
  const auto ds = load_csv(kData / "adult_tiny.csv", spec).dataset;
  const auto path = std::filesystem::temp_directory_path() / "fairshift_adult_out.csv";
  write_dataset_csv(ds, path);
  EXPECT_TRUE(read_dataset_csv(path) == ds);
  std::filesystem::remove(path);
}

TEST(Preprocess, ShippedSpecsParse) {
  for (const char* name : {"adult", "bank", "compas", "german"}) {
    const auto spec = load_preprocess_spec(kConfigs / (std::string(name) + ".spec"));
    EXPECT_EQ(spec.name, name);
    EXPECT_FALSE(spec.numeric_columns.empty());
  }
}
