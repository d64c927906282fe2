#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "fairshift/audit.hpp"
#include "fairshift/error.hpp"
#include "fairshift/gaussian.hpp"
#include "fairshift/kv_config.hpp"
#include "fairshift/preprocess.hpp"
#include "fairshift/report.hpp"
#include "fairshift/rng.hpp"
#include "options.hpp"

namespace fairshift::cli {

CLI::App* add_audit_command(CLI::App& app, AuditOptions& o) {
  auto* sub = app.add_subcommand("audit", "Train classifiers across a bias grid and report error and unfairness");
  sub->add_option("--dataset", o.dataset, "synthetic:desk, synthetic:paper, or a CSV file")
      ->capture_default_str();
  sub->add_option("--spec", o.spec, "Preprocessing spec for a CSV dataset");
  sub->add_option("--classifiers", o.classifiers,
                  "Comma-separated: base_lr,rew,plugin_spd,plugin_eod,thm3_spd,thm3_eod,expgrad")
      ->capture_default_str();
  sub->add_option("--grid", o.grid, "desk, paper, or a grid config file")->capture_default_str();
  sub->add_option("--runs", o.runs, "Override the number of runs of the grid");
  sub->add_option("--lambdas", o.lambdas, "Comma-separated trade-off values for plug-in and thm3 classifiers");
  sub->add_flag("--oracle-eta", o.oracle_eta, "Plug-in classifiers use the exact synthetic posterior");
  sub->add_flag("--svg", o.svg, "Also write scatter and heatmap figures");
  sub->add_flag("--strict", o.strict, "Fail when any record is degenerate or unclassifiable");
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", o.threads, "Worker threads (default: FAIRSHIFT_THREADS or all cores)");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--config", o.config, "key = value file; command-line flags take precedence");
  return sub;
}

namespace {

struct AuditInputs {
  LabeledDataset train;
  LabeledDataset test;
  std::optional<GaussianSubgroupModel> model;
};

AuditInputs load_inputs(const AuditOptions& o) {
  const std::string prefix = "synthetic:";
  if (o.dataset.rfind(prefix, 0) == 0) {
    const auto preset = SyntheticPreset::by_name(o.dataset.substr(prefix.size()));
    auto data = materialize(preset, o.seed);
    return {std::move(data.train), std::move(data.test), std::move(data.model)};
  }
  if (o.spec.empty()) throw UsageError("--spec is required for a CSV dataset");
  if (o.oracle_eta) throw UsageError("--oracle-eta needs a synthetic dataset");
  const auto spec = load_preprocess_spec(o.spec);
  LoadOptions raw;
  raw.standardize = false;
  const auto loaded = load_csv(o.dataset, spec, raw);
  auto split = stratified_split(loaded.dataset, 0.3, splitmix64(o.seed ^ 0x73706c6974ULL));
  const auto scaling = Standardizer::fit(split.train, loaded.numeric_indices);
  return {scaling.apply(split.train), scaling.apply(split.test), std::nullopt};
}

BiasGrid resolve_grid(const AuditOptions& o) {
  BiasGrid grid;
  if (o.grid == "desk") {
    grid = BiasGrid::desk();
  } else if (o.grid == "paper") {
    grid = BiasGrid::paper_default();
  } else {
    grid = load_grid_config(o.grid, BiasGrid::paper_default());
  }
  if (o.runs > 0) grid.runs = o.runs;
  grid.master_seed = o.seed;
  grid.validate();
  return grid;
}

std::string lambda_suffix(const std::optional<double>& lambda) {
  return lambda ? "_lambda" + format_number(*lambda) : "";
}

std::string quadrant_summary(const std::vector<AuditRecord>& records, const FairnessReport& rep) {
  std::ostringstream out;
  if (!rep.baseline) return "";
  out << "\nquadrants against the unbiased baseline (eod vs err): q1 q2 q3 q4 unclassifiable\n";
  std::vector<std::pair<ClassifierId, std::optional<double>>> keys;
  std::map<std::pair<ClassifierId, std::optional<double>>, std::array<std::size_t, 5>> counts;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.classifier, r.lambda);
    if (!counts.count(key)) keys.push_back(key);
    auto& c = counts[key];
    const auto q = quadrant_classify(r, Metric::kEod, *rep.baseline);
    ++c[q ? static_cast<std::size_t>(*q - 1) : 4];
  }
  for (const auto& key : keys) {
    const auto& c = counts[key];
    out << "  " << to_string(key.first) << (key.second ? "@" + format_number(*key.second) : "")
        << ": " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << ' ' << c[4] << '\n';
  }
  out << "\nbounding-box area of (eod, err) over the beta sweep\n";
  for (const auto& key : keys) {
    std::vector<AuditRecord> rs;
    for (const auto& r : records) {
      if (r.sweep == Sweep::kBeta && r.classifier == key.first && r.lambda == key.second) rs.push_back(r);
    }
    out << "  " << to_string(key.first) << (key.second ? "@" + format_number(*key.second) : "")
        << ": " << format_number(bounding_box_area(rs, Metric::kEod)) << '\n';
  }
  return out.str();
}

}  // namespace

int run_audit_command(const AuditOptions& o, const CLI::App& sub) {
  if (o.out.empty()) throw UsageError("--out is required");
  AuditConfig cfg;
  BiasGrid grid;
  try {
    cfg.classifiers = parse_classifier_list(o.classifiers);
    if (!o.lambdas.empty()) cfg.classifier.lambdas = parse_double_list(o.lambdas);
    grid = resolve_grid(o);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.threads = o.threads;

  AuditInputs inputs = [&] {
    try {
      return load_inputs(o);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }();
  if (o.oracle_eta) cfg.oracle_model = &*inputs.model;

  const std::filesystem::path out_dir(o.out);
  std::filesystem::create_directories(out_dir);

  RunManifest manifest;
  manifest.subcommand = "audit";
  manifest.config = resolved_options(sub);
  manifest.dataset_fingerprint = fingerprint(inputs.train) ^ splitmix64(fingerprint(inputs.test));
  manifest.master_seed = o.seed;
  manifest.timestamp = utc_timestamp();
  const auto mhash = manifest.hash();
  write_text_file(out_dir / "manifest.json", manifest.to_json());

  const auto test_hash = fingerprint(inputs.test);
  const auto records = run_audit(inputs.train, inputs.test, grid, cfg);
  write_text_file(out_dir / "results.csv", format_results_csv(records, mhash));
  if (fingerprint(inputs.test) != test_hash) throw std::logic_error("test set changed during the audit");
  for (const auto& r : records) {
    if (r.test_hash != test_hash) throw std::logic_error("a cell saw a modified test set");
  }

  const auto rep = aggregate(records);
  write_text_file(out_dir / "report.csv", format_report_csv(rep, mhash));
  const std::string table = format_report_table(rep) + quadrant_summary(records, rep);
  write_text_file(out_dir / "report.txt", "# manifest=" + mhash + "\n" + table);
  std::cout << table;

  std::vector<std::pair<ClassifierId, std::optional<double>>> keys;
  for (const auto& r : records) {
    const std::pair key{r.classifier, r.lambda};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [id, lambda] : keys) {
    const std::string stem = to_string(id) + lambda_suffix(lambda);
    for (const auto metric : {Metric::kErr, Metric::kSpd, Metric::kEod}) {
      const auto hm = heatmap_matrix(records, id, metric, lambda);
      const std::string name = "heatmap_" + stem + "_" + to_string(metric);
      write_text_file(out_dir / (name + ".csv"), format_heatmap_csv(hm, mhash));
      if (o.svg) write_text_file(out_dir / (name + ".svg"), render_heatmap_svg(hm, stem + " " + to_string(metric)));
    }
    if (o.svg) {
      std::vector<AuditRecord> rs;
      for (const auto& r : records) {
        if (r.classifier == id && r.lambda == lambda) rs.push_back(r);
      }
      const Baseline* base = rep.baseline ? &*rep.baseline : nullptr;
      write_text_file(out_dir / ("scatter_" + stem + ".svg"),
                      render_scatter_svg(rs, Metric::kEod, base, stem + ": eod vs error"));
    }
  }

  if (o.strict) {
    for (const auto& r : records) {
      if (r.degenerate || !rep.baseline || !quadrant_classify(r, Metric::kEod, *rep.baseline)) {
        std::cerr << "strict: degenerate or unclassifiable records present\n";
        return 1;
      }
    }
  }
  return 0;
}

}  // namespace fairshift::cli
