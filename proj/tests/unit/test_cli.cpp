#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "fairshift/report.hpp"

namespace fs = std::filesystem;
using fairshift::read_text_file;
using fairshift::write_text_file;

namespace {

const std::string kCli = FAIRSHIFT_CLI;
const fs::path kData = FAIRSHIFT_TEST_DATA;
const fs::path kConfigs = FAIRSHIFT_CONFIG_DIR;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const auto log = fs::temp_directory_path() / "fairshift_cli_test.log";
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(log)};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fairshift_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path small_grid() {
  const auto path = fs::temp_directory_path() / "fairshift_cli_grid.cfg";
  write_text_file(path, "beta_pos = 0.5, 1\nbeta_neg = 0.5, 1\nnu = 0.3\nruns = 1\n");
  return path;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("verify --check nothing").code, 2);
  EXPECT_EQ(run("audit --classifiers svm --out " + fresh_dir("bad").string()).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, AuditWithoutOutWritesNothing) {
  const auto before = fs::current_path();
  const auto r = run("audit --dataset synthetic:desk --grid desk");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("--out"), std::string::npos);
  EXPECT_FALSE(fs::exists(before / "results.csv"));
}

TEST(Cli, VerifyComplexity) {
  const auto r = run("verify --check complexity --alpha 1 --beta 1 --eps 0.1 --delta 0.05");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"n\":47218"), std::string::npos);
  EXPECT_EQ(run("verify --check complexity --delta 2").code, 2);
}

TEST(Cli, VerifyWritesJsonLines) {
  const auto dir = fresh_dir("verify");
  const auto r = run("verify --check sandwich --cases 20 --seed 1 --out " + dir.string());
  EXPECT_EQ(r.code, 0);
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  const auto lines = read_text_file(dir / "verify.jsonl");
  EXPECT_NE(lines.find(manifest["manifest_hash"].get<std::string>()), std::string::npos);
  EXPECT_NE(lines.find("\"passed\":20"), std::string::npos);
}

TEST(Cli, AuditWritesManifestFirstAndReferencesIt) {
  const auto dir = fresh_dir("audit");
  const auto r = run("audit --dataset synthetic:desk --classifiers base_lr,rew --grid " + small_grid().string() +
                     " --seed 3 --svg --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  const std::string ref = "# manifest=" + manifest["manifest_hash"].get<std::string>();
  for (const char* f : {"results.csv", "report.csv", "report.txt", "heatmap_base_lr_err.csv",
                        "heatmap_rew_eod.csv", "heatmap_rew_spd.csv"}) {
    ASSERT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_EQ(first_line(read_text_file(dir / f)), ref) << f;
  }
  EXPECT_TRUE(fs::exists(dir / "scatter_rew.svg"));
  EXPECT_TRUE(fs::exists(dir / "heatmap_base_lr_eod.svg"));
  const auto records = fairshift::parse_results_csv(read_text_file(dir / "results.csv"));
  EXPECT_EQ(records.size(), 2u * 5u);
  EXPECT_EQ(manifest["master_seed"], 3);
}

TEST(Cli, ConfigFileLosesToFlags) {
  const auto cfg = fs::temp_directory_path() / "fairshift_cli_audit.cfg";
  write_text_file(cfg, "seed = 5\nclassifiers = base_lr\ngrid = " + small_grid().string() + "\n");
  const auto dir = fresh_dir("config");
  ASSERT_EQ(run("audit --config " + cfg.string() + " --seed 6 --out " + dir.string()).code, 0);
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 6);
  write_text_file(cfg, "colour = blue\n");
  EXPECT_EQ(run("audit --config " + cfg.string() + " --out " + fresh_dir("config2").string()).code, 2);
}

TEST(Cli, AuditIsDeterministic) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  const std::string args = "audit --dataset synthetic:desk --classifiers base_lr --grid " + small_grid().string() +
                           " --seed 11 --out ";
  ASSERT_EQ(run(args + a.string() + " --threads 1").code, 0);
  ASSERT_EQ(run(args + b.string() + " --threads 3").code, 0);
  EXPECT_EQ(read_text_file(a / "results.csv"), read_text_file(b / "results.csv"));
}

TEST(Cli, CsvDatasetAndStrictMode) {
  const std::string base = "audit --dataset " + (kData / "adult_tiny.csv").string() + " --spec " +
                           (kConfigs / "adult.spec").string() + " --classifiers base_lr";
  EXPECT_EQ(run(base + " --grid " + small_grid().string() + " --out " + fresh_dir("csv").string()).code, 0);
  const auto harsh = fs::temp_directory_path() / "fairshift_cli_harsh.cfg";
  write_text_file(harsh, "beta_pos = 0.01, 1\nbeta_neg = 1\nnu = 0\nruns = 1\n");
  const auto dir = fresh_dir("strict");
  EXPECT_EQ(run(base + " --grid " + harsh.string() + " --out " + dir.string()).code, 0);
  EXPECT_EQ(run(base + " --grid " + harsh.string() + " --strict --out " + dir.string()).code, 1);
  EXPECT_EQ(run("audit --dataset " + (kData / "adult_tiny.csv").string() + " --out " + dir.string()).code, 2);
}

TEST(Cli, SynthWritesDatasetAndMetadata) {
  const auto dir = fresh_dir("synth");
  ASSERT_EQ(run("synth --preset desk --seed 4 --out " + dir.string()).code, 0);
  const auto meta = nlohmann::json::parse(read_text_file(dir / "metadata.json"));
  EXPECT_EQ(meta["dim"], 20);
  EXPECT_EQ(meta["sigma"], 1.0);
  EXPECT_EQ(meta["seed"], 4);
  EXPECT_TRUE(fs::exists(dir / "train.csv"));
  EXPECT_TRUE(fs::exists(dir / "test.csv"));
  EXPECT_EQ(run("synth --preset galaxy --out " + dir.string()).code, 2);
}
