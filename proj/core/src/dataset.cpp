#include "fairshift/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fairshift/error.hpp"
#include "fairshift/preprocess.hpp"
#include "fairshift/rng.hpp"

namespace fairshift {

LabeledDataset::LabeledDataset(FeatureMatrix features,
                               std::vector<std::uint8_t> labels,
                               std::vector<std::uint8_t> groups,
                               std::vector<std::string> feature_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      feature_names_(std::move(feature_names)) {
  const auto n = labels_.size();
  if (n == 0) {
    throw std::invalid_argument("LabeledDataset: at least one row is required");
  }
  if (groups_.size() != n || static_cast<std::size_t>(features_.rows()) != n) {
    throw std::invalid_argument("LabeledDataset: row counts of features, labels and groups differ");
  }
  if (feature_names_.size() != static_cast<std::size_t>(features_.cols())) {
    throw std::invalid_argument("LabeledDataset: feature_names size does not match column count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] > 1 || groups_[i] > 1) {
      throw std::invalid_argument("LabeledDataset: labels and groups must be 0 or 1");
    }
  }
  if (!features_.allFinite()) {
    throw std::invalid_argument("LabeledDataset: non-finite feature value");
  }
}

LabeledDataset LabeledDataset::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix f(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<std::uint8_t> y(rows.size());
  std::vector<std::uint8_t> s(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    if (r >= size()) throw std::out_of_range("select_rows: row index out of range");
    f.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(r));
    y[k] = labels_[r];
    s[k] = groups_[r];
  }
  return LabeledDataset(std::move(f), std::move(y), std::move(s), feature_names_);
}

LabeledDataset LabeledDataset::with_labels(std::vector<std::uint8_t> labels) const {
  return LabeledDataset(features_, std::move(labels), groups_, feature_names_);
}

PerSubgroup<std::vector<std::size_t>> LabeledDataset::subgroup_rows() const {
  PerSubgroup<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i) out[subgroup_of(i)].push_back(i);
  return out;
}

bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
  return a.labels_ == b.labels_ && a.groups_ == b.groups_ &&
         a.feature_names_ == b.feature_names_ &&
         a.features_.rows() == b.features_.rows() &&
         a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
}

SubgroupStats subgroup_stats_from_counts(const PerSubgroup<std::size_t>& counts) {
  SubgroupStats st;
  st.counts = counts;
  const auto n = static_cast<double>(st.total());
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    st.probs[k] = n > 0 ? static_cast<double>(counts[k]) / n : 0.0;
    lo = std::min(lo, st.probs[k]);
    hi = std::max(hi, st.probs[k]);
    if (counts[k] == 0) st.degenerate = true;
  }
  st.imbalance_alpha = st.degenerate ? 0.0 : lo / hi;
  return st;
}

SubgroupStats subgroup_stats(const LabeledDataset& ds) {
  PerSubgroup<std::size_t> counts{};
  for (std::size_t i = 0; i < ds.size(); ++i) ++counts[ds.subgroup_of(i)];
  return subgroup_stats_from_counts(counts);
}

Split stratified_split(const LabeledDataset& ds, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("stratified_split: test_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  const auto groups = ds.subgroup_rows();
  std::vector<std::uint8_t> in_test(ds.size(), 0);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& rows = groups[k];
    const auto n_test = exact_count(test_fraction, rows.size());
    if (rows.size() < 2 || n_test >= rows.size()) {
      throw DegenerateSubgroupError("stratified_split: subgroup (y=" +
                                    std::to_string(subgroup_label(k)) + ", s=" +
                                    std::to_string(subgroup_group(k)) +
                                    ") too small to split");
    }
    for (auto pick : choose_without_replacement(rows.size(), n_test, rng)) {
      in_test[rows[pick]] = 1;
    }
  }
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (in_test[i] ? test_rows : train_rows).push_back(i);
  }
  return Split{ds.select_rows(train_rows), ds.select_rows(test_rows)};
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t fingerprint(const LabeledDataset& ds) {
  std::uint64_t h = kFnvOffset;
  const std::uint64_t dims[2] = {ds.size(), ds.dim()};
  fnv_bytes(h, dims, sizeof dims);
  fnv_bytes(h, ds.labels().data(), ds.labels().size());
  fnv_bytes(h, ds.groups().data(), ds.groups().size());
  const auto& f = ds.features();
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      const double v = f(i, j);
      fnv_bytes(h, &v, sizeof v);
    }
  }
  return h;
}

void write_dataset_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  for (const auto& name : ds.feature_names()) out << name << ',';
  out << "y,s\n";
  char buf[32];
  const auto& f = ds.features();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", f(static_cast<Eigen::Index>(i), j));
      out << buf << ',';
    }
    out << ds.label(i) << ',' << ds.group(i) << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path) {
  const auto table = read_csv_table(path);
  PreprocessSpec spec;
  spec.label_column = "y";
  spec.positive_labels = {"1"};
  spec.negative_labels = {"0"};
  spec.sensitive_column = "s";
  spec.underprivileged_values = {"0"};
  spec.privileged_values = {"1"};
  for (const auto& col : table.header) {
    if (col != "y" && col != "s") spec.numeric_columns.push_back(col);
  }
  LoadOptions opts;
  opts.standardize = false;
  return preprocess_table(table, spec, opts).dataset;
}

}  // namespace fairshift
