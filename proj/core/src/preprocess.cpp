#include "fairshift/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fairshift/error.hpp"
#include "fairshift/kv_config.hpp"

namespace fairshift {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw InputError("csv line " + std::to_string(lineno) + ": unterminated quote");
  fields.push_back(trim(cur));
  return fields;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Either a numeric comparison rule or a value set.
struct GroupRule {
  enum class Op { kNone, kLe, kLt, kGe, kGt } op = Op::kNone;
  double bound = 0.0;

  static GroupRule from(const std::vector<std::string>& values) {
    GroupRule r;
    if (values.size() != 1) return r;
    const auto& v = values.front();
    std::string rest;
    if (v.rfind("<=", 0) == 0) { r.op = Op::kLe; rest = v.substr(2); }
    else if (v.rfind(">=", 0) == 0) { r.op = Op::kGe; rest = v.substr(2); }
    else if (v.rfind('<', 0) == 0) { r.op = Op::kLt; rest = v.substr(1); }
    else if (v.rfind('>', 0) == 0) { r.op = Op::kGt; rest = v.substr(1); }
    if (r.op != Op::kNone && !parse_number(trim(rest), r.bound)) {
      throw InputError("bad numeric group rule: " + v);
    }
    return r;
  }

  bool matches(double x) const {
    switch (op) {
      case Op::kLe: return x <= bound;
      case Op::kLt: return x < bound;
      case Op::kGe: return x >= bound;
      case Op::kGt: return x > bound;
      case Op::kNone: break;
    }
    return false;
  }
};

}  // namespace

CsvTable parse_csv_table(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, lineno);
    if (t.header.empty()) {
      if (!fields.empty() && fields.front().rfind("\xEF\xBB\xBF", 0) == 0) {
        fields.front().erase(0, 3);
      }
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw InputError("csv line " + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw InputError("csv: missing header row");
  if (t.rows.empty()) throw InputError("csv: no data rows");
  return t;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open csv: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv_table(ss.str());
}

PreprocessSpec load_preprocess_spec(const std::filesystem::path& path) {
  const auto cfg = KvConfig::load(path);
  PreprocessSpec spec;
  spec.name = cfg.get("name").value_or(path.stem().string());
  spec.label_column = cfg.get("label_column").value_or("");
  spec.positive_labels = cfg.get_list("positive_label");
  spec.negative_labels = cfg.get_list("negative_label");
  spec.sensitive_column = cfg.get("sensitive_column").value_or("");
  spec.underprivileged_values = cfg.get_list("underprivileged_value");
  spec.privileged_values = cfg.get_list("privileged_value");
  spec.dropped_columns = cfg.get_list("drop");
  spec.categorical_columns = cfg.get_list("categorical");
  spec.numeric_columns = cfg.get_list("numeric");
  if (spec.label_column.empty() || spec.sensitive_column.empty()) {
    throw InputError(path.string() + ": label_column and sensitive_column are required");
  }
  if (spec.positive_labels.empty() || spec.underprivileged_values.empty()) {
    throw InputError(path.string() + ": positive_label and underprivileged_value are required");
  }
  return spec;
}

Standardizer Standardizer::fit(const LabeledDataset& ds, std::vector<std::size_t> columns) {
  Standardizer st;
  st.columns = std::move(columns);
  const auto& f = ds.features();
  const auto n = static_cast<double>(ds.size());
  for (auto c : st.columns) {
    const auto col = f.col(static_cast<Eigen::Index>(c));
    const double mu = col.sum() / n;
    const double var = (col.array() - mu).square().sum() / n;
    const double sd = std::sqrt(var);
    st.mean.push_back(mu);
    st.scale.push_back(sd > 0.0 ? sd : 1.0);
  }
  return st;
}

LabeledDataset Standardizer::apply(const LabeledDataset& ds) const {
  FeatureMatrix f = ds.features();
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] >= ds.dim()) throw std::out_of_range("Standardizer: column out of range");
    auto col = f.col(static_cast<Eigen::Index>(columns[k]));
    col = (col.array() - mean[k]) / scale[k];
  }
  return LabeledDataset(std::move(f), std::vector<std::uint8_t>(ds.labels().begin(), ds.labels().end()),
                        std::vector<std::uint8_t>(ds.groups().begin(), ds.groups().end()),
                        ds.feature_names());
}

LoadedData preprocess_table(const CsvTable& table, const PreprocessSpec& spec,
                            const LoadOptions& options) {
  std::map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (!col_index.emplace(table.header[i], i).second) {
      throw InputError("duplicate column: " + table.header[i]);
    }
  }
  auto require = [&](const std::string& name) {
    const auto it = col_index.find(name);
    if (it == col_index.end()) throw InputError("missing column: " + name);
    return it->second;
  };
  if (contains(spec.dropped_columns, spec.label_column) ||
      contains(spec.dropped_columns, spec.sensitive_column)) {
    throw InputError("label and sensitive columns cannot be dropped");
  }
  const auto label_col = require(spec.label_column);
  const auto sens_col = require(spec.sensitive_column);
  for (const auto& c : spec.dropped_columns) require(c);

  std::set<std::string> accounted = {spec.label_column, spec.sensitive_column};
  accounted.insert(spec.dropped_columns.begin(), spec.dropped_columns.end());
  for (const auto& c : spec.categorical_columns) {
    require(c);
    if (!accounted.insert(c).second) throw InputError("column listed twice: " + c);
  }
  for (const auto& c : spec.numeric_columns) {
    require(c);
    if (!accounted.insert(c).second) throw InputError("column listed twice: " + c);
  }
  for (const auto& h : table.header) {
    if (!accounted.count(h)) {
      throw InputError("column '" + h + "' is not declared as dropped, categorical or numeric");
    }
  }

  // Output layout follows raw header order; each categorical expands in place.
  struct OutCol {
    std::size_t raw;
    bool numeric;
    std::string level;
  };
  std::vector<OutCol> layout;
  std::vector<std::string> names;
  std::vector<std::size_t> numeric_indices;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const auto& h = table.header[i];
    if (contains(spec.numeric_columns, h)) {
      numeric_indices.push_back(layout.size());
      layout.push_back({i, true, {}});
      names.push_back(h);
    } else if (contains(spec.categorical_columns, h)) {
      std::set<std::string> levels;
      for (const auto& row : table.rows) levels.insert(row[i]);
      for (const auto& lv : levels) {
        layout.push_back({i, false, lv});
        names.push_back(h + "=" + lv);
      }
    }
  }

  const auto group_rule = GroupRule::from(spec.underprivileged_values);
  const auto n = table.rows.size();
  FeatureMatrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(layout.size()));
  std::vector<std::uint8_t> y(n);
  std::vector<std::uint8_t> s(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const auto& lab = row[label_col];
    if (contains(spec.positive_labels, lab)) {
      y[r] = 1;
    } else if (spec.negative_labels.empty() || contains(spec.negative_labels, lab)) {
      y[r] = 0;
    } else {
      throw InputError("row " + std::to_string(r + 1) + ": unmapped label value '" + lab + "'");
    }
    const auto& g = row[sens_col];
    if (group_rule.op != GroupRule::Op::kNone) {
      double v = 0.0;
      if (!parse_number(g, v)) {
        throw InputError("row " + std::to_string(r + 1) + ": non-numeric sensitive value '" + g + "'");
      }
      s[r] = group_rule.matches(v) ? 0 : 1;
    } else if (contains(spec.underprivileged_values, g)) {
      s[r] = 0;
    } else if (spec.privileged_values.empty() || contains(spec.privileged_values, g)) {
      s[r] = 1;
    } else {
      throw InputError("row " + std::to_string(r + 1) + ": unmapped sensitive value '" + g + "'");
    }
    for (std::size_t c = 0; c < layout.size(); ++c) {
      const auto& oc = layout[c];
      double v = 0.0;
      if (oc.numeric) {
        if (!parse_number(row[oc.raw], v)) {
          throw InputError("row " + std::to_string(r + 1) + ", column '" +
                           table.header[oc.raw] + "': non-numeric value '" + row[oc.raw] + "'");
        }
      } else {
        v = row[oc.raw] == oc.level ? 1.0 : 0.0;
      }
      f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }

  LoadedData out{LabeledDataset(std::move(f), std::move(y), std::move(s), std::move(names)),
                 numeric_indices, std::nullopt};
  if (options.standardize) {
    auto st = options.scaling ? *options.scaling : Standardizer::fit(out.dataset, numeric_indices);
    out.dataset = st.apply(out.dataset);
    out.scaling = std::move(st);
  }
  return out;
}

LoadedData load_csv(const std::filesystem::path& path, const PreprocessSpec& spec,
                    const LoadOptions& options) {
  return preprocess_table(read_csv_table(path), spec, options);
}

}  // namespace fairshift
