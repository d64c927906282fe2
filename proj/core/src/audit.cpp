#include "fairshift/audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "fairshift/error.hpp"
#include "fairshift/rng.hpp"

namespace fairshift {

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FAIRSHIFT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<AuditRecord> audit_cell(const LabeledDataset& train, const LabeledDataset& test,
                                    const GridCell& cell, const AuditConfig& config,
                                    const PerSubgroup<double>& original_probs) {
  std::optional<LabeledDataset> biased;
  try {
    biased = apply_bias(train, cell.setting, cell.cell_seed);
  } catch (const DegenerateSubgroupError&) {
  }
  const std::uint64_t test_hash = fingerprint(test);

  std::vector<AuditRecord> out;
  for (std::size_t k = 0; k < config.classifiers.size(); ++k) {
    const auto id = config.classifiers[k];
    std::vector<std::optional<double>> lambdas;
    if (uses_lambda(id)) {
      lambdas.assign(config.classifier.lambdas.begin(), config.classifier.lambdas.end());
    } else {
      lambdas.push_back(std::nullopt);
    }
    for (const auto& lambda : lambdas) {
      AuditRecord rec;
      rec.run = cell.run;
      rec.setting = cell.setting;
      rec.sweep = cell.sweep;
      rec.classifier = id;
      rec.lambda = lambda;
      rec.cell_seed = cell.cell_seed;
      rec.test_hash = test_hash;
      rec.n_train_effective = biased ? biased->size() : 0;
      if (!biased) {
        rec.degenerate = true;
        out.push_back(rec);
        continue;
      }
      try {
        TrainContext ctx;
        ctx.setting = cell.setting;
        ctx.original_probs = original_probs;
        ctx.lambda = lambda.value_or(0.0);
        ctx.oracle_model = config.oracle_model;
        ctx.config = config.classifier;
        const auto model = train_classifier(id, *biased, ctx);
        const auto preds = model.predict(test, splitmix64(cell.cell_seed + 0x51ed2701ULL * (k + 1)));
        const auto conf = confusion(preds, test);
        rec.err = error_rate(conf);
        rec.spd = spd(conf);
        rec.eod = eod(conf);
      } catch (const DegenerateSubgroupError&) {
        rec.degenerate = true;
      } catch (const std::domain_error&) {
        // Singular trade-off parameter for this cell.
        rec.degenerate = true;
      }
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace

std::vector<AuditRecord> run_audit(const LabeledDataset& train, const LabeledDataset& test,
                                   const BiasGrid& grid, const AuditConfig& config) {
  if (config.classifiers.empty()) throw InputError("run_audit: no classifiers");
  grid.validate();
  const auto stats = subgroup_stats(train);
  if (stats.degenerate) throw DegenerateSubgroupError("run_audit: empty subgroup in unbiased training data");

  const auto cells = enumerate_grid(grid);
  std::vector<std::vector<AuditRecord>> slots(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      try {
        slots[idx] = audit_cell(train, test, cells[idx], config, stats.probs);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(cells.size());
        return;
      }
    }
  };

  const unsigned n_threads =
      std::min<unsigned>(resolve_thread_count(config.threads), static_cast<unsigned>(cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<AuditRecord> records;
  for (auto& slot : slots) {
    for (auto& r : slot) records.push_back(std::move(r));
  }
  return records;
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::kErr: return "err";
    case Metric::kSpd: return "spd";
    case Metric::kEod: return "eod";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "err") return Metric::kErr;
  if (s == "spd") return Metric::kSpd;
  if (s == "eod") return Metric::kEod;
  throw InputError("unknown metric: '" + s + "'");
}

MetricValue metric_of(const AuditRecord& r, Metric m) {
  switch (m) {
    case Metric::kErr: return r.err;
    case Metric::kSpd: return r.spd;
    case Metric::kEod: return r.eod;
  }
  return std::nullopt;
}

const MetricSummary& ClassifierSummary::get(Metric m) const {
  switch (m) {
    case Metric::kErr: return err;
    case Metric::kSpd: return spd;
    default: return eod;
  }
}

double Baseline::get(Metric m) const {
  switch (m) {
    case Metric::kErr: return err;
    case Metric::kSpd: return spd;
    default: return eod;
  }
}

const ClassifierSummary* FairnessReport::find(Sweep sweep, ClassifierId id,
                                              std::optional<double> lambda) const {
  const auto& table = sweep == Sweep::kBeta ? beta_sweep : label_sweep;
  for (const auto& s : table) {
    if (s.classifier == id && s.lambda == lambda) return &s;
  }
  return nullptr;
}

namespace {

using CellKey = std::tuple<double, double, double>;

CellKey cell_key(const AuditRecord& r) {
  return {r.setting.beta_pos, r.setting.beta_neg, r.setting.nu};
}

// Mean over runs of one metric, per cell; cells with no defined value are
// reported as nullopt.
std::map<CellKey, std::optional<double>> per_cell_means(const std::vector<const AuditRecord*>& rs,
                                                        Metric m) {
  std::map<CellKey, std::pair<double, std::size_t>> acc;
  for (const auto* r : rs) {
    auto& slot = acc[cell_key(*r)];
    if (const auto v = metric_of(*r, m)) {
      slot.first += *v;
      ++slot.second;
    }
  }
  std::map<CellKey, std::optional<double>> out;
  for (const auto& [key, sum] : acc) {
    out[key] = sum.second > 0 ? std::optional<double>(sum.first / static_cast<double>(sum.second))
                              : std::nullopt;
  }
  return out;
}

MetricSummary summarize(const std::vector<const AuditRecord*>& rs, Metric m) {
  MetricSummary s;
  std::vector<double> means;
  for (const auto& [key, v] : per_cell_means(rs, m)) {
    if (v) {
      means.push_back(*v);
    } else {
      ++s.excluded;
    }
  }
  s.cells = means.size();
  if (means.empty()) return s;
  double sum = 0.0;
  for (double v : means) sum += v;
  s.mean = sum / static_cast<double>(means.size());
  double ss = 0.0;
  for (double v : means) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(means.size()));
  return s;
}

std::vector<ClassifierSummary> summarize_sweep(const std::vector<AuditRecord>& records, Sweep sweep) {
  std::vector<std::pair<ClassifierId, std::optional<double>>> groups;
  for (const auto& r : records) {
    if (r.sweep != sweep) continue;
    const std::pair key{r.classifier, r.lambda};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  std::vector<ClassifierSummary> out;
  for (const auto& [id, lambda] : groups) {
    std::vector<const AuditRecord*> rs;
    for (const auto& r : records) {
      if (r.sweep == sweep && r.classifier == id && r.lambda == lambda) rs.push_back(&r);
    }
    ClassifierSummary cs;
    cs.classifier = id;
    cs.lambda = lambda;
    cs.err = summarize(rs, Metric::kErr);
    cs.spd = summarize(rs, Metric::kSpd);
    cs.eod = summarize(rs, Metric::kEod);
    out.push_back(cs);
  }
  return out;
}

}  // namespace

FairnessReport aggregate(const std::vector<AuditRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  FairnessReport rep;
  rep.records = records.size();
  for (const auto& r : records) rep.degenerate_records += r.degenerate ? 1 : 0;
  if (rep.degenerate_records == records.size()) {
    throw DegenerateSubgroupError("aggregate: every record is degenerate");
  }
  rep.beta_sweep = summarize_sweep(records, Sweep::kBeta);
  rep.label_sweep = summarize_sweep(records, Sweep::kLabel);

  std::vector<const AuditRecord*> base;
  for (const auto& r : records) {
    if (r.classifier == ClassifierId::kBaseLr && r.setting.is_identity() && !r.degenerate) {
      // The identity cell appears in both sweeps; count each run once.
      if (r.sweep == Sweep::kBeta) base.push_back(&r);
    }
  }
  if (base.empty()) {
    for (const auto& r : records) {
      if (r.classifier == ClassifierId::kBaseLr && r.setting.is_identity() && !r.degenerate) {
        base.push_back(&r);
      }
    }
  }
  if (!base.empty()) {
    Baseline b;
    const auto err = summarize(base, Metric::kErr);
    const auto sp = summarize(base, Metric::kSpd);
    const auto eo = summarize(base, Metric::kEod);
    b.err = err.mean;
    b.spd = sp.mean;
    b.eod = eo.mean;
    rep.baseline = b;
  }
  return rep;
}

int quadrant_classify(double err, double unfairness, double baseline_err,
                      double baseline_unfairness) {
  // Admissible sides per axis: +1 worse (higher), -1 better (lower).
  std::vector<int> err_sides;
  std::vector<int> unf_sides;
  if (err >= baseline_err) err_sides.push_back(1);
  if (err <= baseline_err) err_sides.push_back(-1);
  if (unfairness >= baseline_unfairness) unf_sides.push_back(1);
  if (unfairness <= baseline_unfairness) unf_sides.push_back(-1);
  int best = 5;
  for (int e : err_sides) {
    for (int u : unf_sides) {
      int q = 0;
      if (e > 0 && u > 0) q = 1;
      else if (e < 0 && u > 0) q = 2;
      else if (e < 0 && u < 0) q = 3;
      else q = 4;
      best = std::min(best, q);
    }
  }
  return best;
}

std::optional<int> quadrant_classify(const AuditRecord& r, Metric unfairness,
                                     const Baseline& baseline) {
  const auto u = metric_of(r, unfairness);
  if (!r.err || !u) return std::nullopt;
  return quadrant_classify(*r.err, *u, baseline.err, baseline.get(unfairness));
}

HeatmapMatrix heatmap_matrix(const std::vector<AuditRecord>& records, ClassifierId id, Metric metric,
                             std::optional<double> lambda) {
  std::vector<const AuditRecord*> rs;
  for (const auto& r : records) {
    if (r.sweep == Sweep::kBeta && r.classifier == id && r.lambda == lambda) rs.push_back(&r);
  }
  if (rs.empty()) throw InputError("heatmap_matrix: no beta-sweep records for " + to_string(id));
  HeatmapMatrix hm;
  for (const auto* r : rs) {
    hm.beta_pos.push_back(r->setting.beta_pos);
    hm.beta_neg.push_back(r->setting.beta_neg);
  }
  for (auto* v : {&hm.beta_pos, &hm.beta_neg}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  const auto means = per_cell_means(rs, metric);
  hm.cells.reserve(hm.rows() * hm.cols());
  for (double bp : hm.beta_pos) {
    for (double bn : hm.beta_neg) {
      const auto it = means.find(CellKey{bp, bn, 0.0});
      if (it == means.end()) throw InputError("heatmap_matrix: ragged beta grid");
      hm.cells.push_back(it->second);
    }
  }
  return hm;
}

}  // namespace fairshift
