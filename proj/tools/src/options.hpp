#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

namespace fairshift::cli {

// Bad flags or flag values; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fills options of `sub` that were not given on the command line from a
// `key = value` file whose keys are the long flag names.
void apply_config_file(CLI::App& sub, const std::string& path);

using ResolvedConfig = std::vector<std::pair<std::string, std::string>>;

// Final value of every option of `sub` (except help and config), in
// declaration order.
ResolvedConfig resolved_options(const CLI::App& sub);

struct AuditOptions {
  std::string dataset = "synthetic:desk";
  std::string spec;
  std::string classifiers = "base_lr,rew,expgrad";
  std::string grid = "desk";
  int runs = 0;
  std::string lambdas;
  bool oracle_eta = false;
  bool svg = false;
  bool strict = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  unsigned threads = 0;
};

struct VerifyOptions {
  std::string check;
  int cases = 0;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double beta = 1.0;
  double eps = 0.1;
  double delta = 0.05;
  int trials = 100;
  std::string out;
  std::string config;
};

struct SynthOptions {
  std::string preset = "desk";
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

CLI::App* add_audit_command(CLI::App& app, AuditOptions& opts);
CLI::App* add_verify_command(CLI::App& app, VerifyOptions& opts);
CLI::App* add_synth_command(CLI::App& app, SynthOptions& opts);

int run_audit_command(const AuditOptions& opts, const CLI::App& sub);
int run_verify_command(const VerifyOptions& opts, const CLI::App& sub);
int run_synth_command(const SynthOptions& opts, const CLI::App& sub);

std::string utc_timestamp();

}  // namespace fairshift::cli
