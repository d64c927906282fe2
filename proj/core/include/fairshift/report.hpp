#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fairshift/audit.hpp"

namespace fairshift {

// Record of how a run was invoked. The hash covers everything except the
// timestamp, so identical invocations share it.
struct RunManifest {
  std::string subcommand;
  // Resolved configuration, flags merged over the config file.
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t dataset_fingerprint = 0;
  std::string version = FAIRSHIFT_VERSION;
  std::uint64_t master_seed = 0;
  std::string timestamp;

  std::string to_json() const;
  std::string hash() const;
};

std::string hex64(std::uint64_t v);

// %.6g; empty string for a missing value.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

// Columns: run,beta_pos,beta_neg,nu,classifier,lambda,err,spd,eod,
// n_train_effective,degenerate,seed,sweep. Preceded by `# manifest=<hash>`
// when a hash is given.
std::string format_results_csv(const std::vector<AuditRecord>& records,
                               const std::string& manifest_hash = {});
// Inverse of format_results_csv; the test hash is not stored and reads as 0.
std::vector<AuditRecord> parse_results_csv(const std::string& text);
// Rounds every real-valued field to the CSV precision.
AuditRecord quantize(const AuditRecord& r);

std::string format_report_csv(const FairnessReport& rep, const std::string& manifest_hash = {});
std::string format_report_table(const FairnessReport& rep);

std::string format_heatmap_csv(const HeatmapMatrix& hm, const std::string& manifest_hash = {});

// Area of the axis-aligned box around the (unfairness, error) points of the
// records that have both metrics; 0 for fewer than two points.
double bounding_box_area(const std::vector<AuditRecord>& records, Metric unfairness);

// One marker per record in the (unfairness, error) plane, with the baseline
// as reference lines. Stronger bias is drawn in a lighter shade.
std::string render_scatter_svg(const std::vector<AuditRecord>& records, Metric unfairness,
                               const Baseline* baseline, const std::string& title);

// Shade scale runs linearly from 0 (dark) to the matrix maximum (light);
// missing cells are hatched.
std::string render_heatmap_svg(const HeatmapMatrix& hm, const std::string& title);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fairshift
