#include <gtest/gtest.h>

#include <json.hpp>
#include <regex>
#include <set>

#include "fairshift/audit.hpp"
#include "fairshift/error.hpp"
#include "fairshift/gaussian.hpp"
#include "fairshift/report.hpp"

using namespace fairshift;

namespace {

std::vector<AuditRecord> sample_records() {
  const auto m = make_model(3, 1.0, kUniformPriors, 41);
  const auto train = sample(m, 400, 42);
  const auto test = sample(m, 200, 43);
  AuditConfig cfg;
  cfg.classifiers = {ClassifierId::kBaseLr, ClassifierId::kThm3Eod};
  cfg.classifier.lambdas = {-0.2, 0.4};
  BiasGrid g = BiasGrid::desk(1);
  g.runs = 2;
  return run_audit(train, test, g, cfg);
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Manifest, HashIgnoresTimestamp) {
  RunManifest a;
  a.subcommand = "audit";
  a.config = {{"seed", "7"}, {"grid", "desk"}};
  a.master_seed = 7;
  a.timestamp = "2020-01-01T00:00:00Z";
  auto b = a;
  b.timestamp = "2030-01-01T00:00:00Z";
  EXPECT_EQ(a.hash(), b.hash());
  b.config[0].second = "8";
  EXPECT_NE(a.hash(), b.hash());
  const auto j = nlohmann::json::parse(a.to_json());
  EXPECT_EQ(j["subcommand"], "audit");
  EXPECT_EQ(j["manifest_hash"], a.hash());
  EXPECT_EQ(j["version"], FAIRSHIFT_VERSION);
}

TEST(Manifest, HashIgnoresOutputDirAndThreads) {
  RunManifest a;
  a.subcommand = "audit";
  a.config = {{"seed", "7"}, {"threads", "1"}, {"out", "/tmp/a"}};
  auto b = a;
  b.config[1].second = "4";
  b.config[2].second = "/tmp/b";
  EXPECT_EQ(a.hash(), b.hash());
  const auto j = nlohmann::json::parse(b.to_json());
  EXPECT_EQ(j["config"]["out"], "/tmp/b");
}

TEST(Numbers, SixSignificantDigits) {
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_optional(std::nullopt), "");
  EXPECT_EQ(hex64(255).size(), 16u);
}

TEST(ResultsCsv, HeaderAndManifestLine) {
  const auto text = format_results_csv(sample_records(), "abc");
  EXPECT_EQ(text.rfind("# manifest=abc\nrun,beta_pos,beta_neg,nu,classifier,lambda,err,spd,eod,"
                       "n_train_effective,degenerate,seed,sweep\n",
                       0),
            0u);
}

TEST(ResultsCsv, RoundTripsFieldForField) {
  const auto recs = sample_records();
  const auto back = parse_results_csv(format_results_csv(recs, "abc"));
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) EXPECT_TRUE(back[k] == quantize(recs[k])) << k;
  EXPECT_EQ(format_results_csv(back), format_results_csv(recs));
}

TEST(ResultsCsv, MissingValuesAreEmptyFields) {
  AuditRecord r;
  r.degenerate = true;
  r.setting = {0.1, 1.0, 0.0};
  const auto text = format_results_csv({r});
  EXPECT_NE(text.find("base_lr,,,,,"), std::string::npos);
  const auto back = parse_results_csv(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_FALSE(back[0].err.has_value());
  EXPECT_TRUE(back[0].degenerate);
}

TEST(ResultsCsv, RejectsMalformed) {
  EXPECT_THROW(parse_results_csv(""), InputError);
  EXPECT_THROW(parse_results_csv("run,beta_pos\n"), InputError);
}

TEST(ReportOutputs, CsvAndTable) {
  const auto rep = aggregate(sample_records());
  const auto csv = format_report_csv(rep, "abc");
  EXPECT_EQ(csv.rfind("# manifest=abc\n", 0), 0u);
  EXPECT_NE(csv.find("thm3_eod"), std::string::npos);
  const auto table = format_report_table(rep);
  EXPECT_NE(table.find("base_lr"), std::string::npos);
}

TEST(HeatmapOutputs, CsvAndSvg) {
  const auto recs = sample_records();
  const auto hm = heatmap_matrix(recs, ClassifierId::kBaseLr, Metric::kErr);
  const auto csv = format_heatmap_csv(hm, "abc");
  EXPECT_EQ(count(csv, "\n"), 1u + 1u + 4u);
  const auto svg = render_heatmap_svg(hm, "t");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "class=\"cell\""), 16u);
}

TEST(HeatmapOutputs, MissingCellsAreHatchedAndConstantIsUniform) {
  HeatmapMatrix hm;
  hm.beta_pos = {0.5, 1.0};
  hm.beta_neg = {1.0};
  hm.cells = {std::nullopt, 0.2};
  const auto svg = render_heatmap_svg(hm, "t");
  EXPECT_NE(svg.find("hatch"), std::string::npos);
  HeatmapMatrix flat;
  flat.beta_pos = {0.5, 1.0};
  flat.beta_neg = {0.5, 1.0};
  flat.cells = {0.3, 0.3, 0.3, 0.3};
  const auto flat_svg = render_heatmap_svg(flat, "t");
  std::regex fill(R"re(class="cell"[^>]*fill="(rgb\([0-9,]+\))")re");
  std::set<std::string> fills;
  for (auto it = std::sregex_iterator(flat_svg.begin(), flat_svg.end(), fill); it != std::sregex_iterator(); ++it) {
    fills.insert((*it)[1]);
  }
  EXPECT_EQ(fills.size(), 1u);
}

TEST(Scatter, MarkersAndReferenceLines) {
  AuditRecord r;
  r.err = 0.2;
  r.eod = 0.1;
  Baseline b{0.25, 0.0, 0.05};
  const auto svg = render_scatter_svg({r}, Metric::kEod, &b, "one");
  EXPECT_EQ(count(svg, "class=\"marker\""), 1u);
  EXPECT_EQ(count(svg, "class=\"baseline\""), 2u);
}

TEST(BoundingBox, Area) {
  AuditRecord a, b, c;
  a.err = 0.1;
  a.eod = 0.0;
  b.err = 0.3;
  b.eod = 0.5;
  c.err = 0.2;
  EXPECT_NEAR(bounding_box_area({a, b, c}, Metric::kEod), 0.2 * 0.5, 1e-15);
  EXPECT_EQ(bounding_box_area({a}, Metric::kEod), 0.0);
}
