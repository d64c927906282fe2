#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairshift/bias.hpp"
#include "fairshift/classifier.hpp"
#include "fairshift/dataset.hpp"
#include "fairshift/metrics.hpp"

namespace fairshift {

struct AuditConfig {
  std::vector<ClassifierId> classifiers = {ClassifierId::kBaseLr};
  ClassifierConfig classifier;
  // When set, plug-in classifiers use the exact posterior of this model.
  const GaussianSubgroupModel* oracle_model = nullptr;
  // 0 = FAIRSHIFT_THREADS if set, else hardware concurrency.
  unsigned threads = 0;
};

struct AuditRecord {
  int run = 0;
  BiasSetting setting;
  Sweep sweep = Sweep::kBeta;
  ClassifierId classifier = ClassifierId::kBaseLr;
  std::optional<double> lambda;
  MetricValue err;
  MetricValue spd;
  MetricValue eod;
  std::size_t n_train_effective = 0;
  std::uint64_t cell_seed = 0;
  bool degenerate = false;
  // Fingerprint of the test set as seen by this cell.
  std::uint64_t test_hash = 0;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

unsigned resolve_thread_count(unsigned requested);

// One record per (run, cell, classifier, lambda), in grid enumeration order,
// then classifier list order, then lambda order. Cells whose biased training
// set or classifier cannot be built are kept with degenerate = true and no
// metrics. Throws DegenerateSubgroupError if the identity cell itself is
// degenerate, InputError on an empty classifier list.
std::vector<AuditRecord> run_audit(const LabeledDataset& train, const LabeledDataset& test,
                                   const BiasGrid& grid, const AuditConfig& config);

enum class Metric { kErr, kSpd, kEod };
std::string to_string(Metric m);
Metric parse_metric(const std::string& s);
MetricValue metric_of(const AuditRecord& r, Metric m);

struct MetricSummary {
  double mean = 0.0;
  // Population standard deviation over cells.
  double stddev = 0.0;
  std::size_t cells = 0;
  // Cells with no defined value in any run.
  std::size_t excluded = 0;
};

struct ClassifierSummary {
  ClassifierId classifier = ClassifierId::kBaseLr;
  std::optional<double> lambda;
  MetricSummary err;
  MetricSummary spd;
  MetricSummary eod;

  const MetricSummary& get(Metric m) const;
};

struct Baseline {
  double err = 0.0;
  double spd = 0.0;
  double eod = 0.0;

  double get(Metric m) const;
};

struct FairnessReport {
  std::vector<ClassifierSummary> beta_sweep;
  std::vector<ClassifierSummary> label_sweep;
  // Unbiased base_lr, averaged over runs, when present in the records.
  std::optional<Baseline> baseline;
  std::size_t records = 0;
  std::size_t degenerate_records = 0;

  const ClassifierSummary* find(Sweep sweep, ClassifierId id,
                                std::optional<double> lambda = std::nullopt) const;
};

// Per cell, the mean over runs; then mean and population std over cells.
// Throws std::invalid_argument on empty input and DegenerateSubgroupError
// when every record is degenerate.
FairnessReport aggregate(const std::vector<AuditRecord>& records);

// Position against the baseline in the (unfairness, error) plane:
// 1 = worse on both, 2 = lower error but higher unfairness,
// 3 = better on both, 4 = higher error but lower unfairness.
// On a boundary the lowest admissible index wins.
int quadrant_classify(double err, double unfairness, double baseline_err,
                      double baseline_unfairness);
// nullopt when either metric is missing.
std::optional<int> quadrant_classify(const AuditRecord& r, Metric unfairness,
                                     const Baseline& baseline);

struct HeatmapMatrix {
  std::vector<double> beta_pos;  // rows, ascending
  std::vector<double> beta_neg;  // columns, ascending
  std::vector<std::optional<double>> cells;  // row-major

  std::size_t rows() const noexcept { return beta_pos.size(); }
  std::size_t cols() const noexcept { return beta_neg.size(); }
  const std::optional<double>& at(std::size_t r, std::size_t c) const {
    return cells[r * beta_neg.size() + c];
  }
};

// Mean over runs of `metric` for each beta-sweep cell of one classifier.
// Throws InputError if some (beta_pos, beta_neg) pair has no record.
HeatmapMatrix heatmap_matrix(const std::vector<AuditRecord>& records, ClassifierId id, Metric metric,
                             std::optional<double> lambda = std::nullopt);

}  // namespace fairshift
