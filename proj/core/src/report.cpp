#include "fairshift/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairshift/error.hpp"
#include "fairshift/kv_config.hpp"

namespace fairshift {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

// Keys that never change results stay out of the hash.
bool run_only_key(const std::string& k) { return k == "out" || k == "threads"; }

nlohmann::ordered_json manifest_body(const RunManifest& m, bool for_hash) {
  nlohmann::ordered_json j;
  j["subcommand"] = m.subcommand;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) {
    if (!for_hash || !run_only_key(k)) cfg[k] = v;
  }
  j["config"] = cfg;
  j["dataset_fingerprint"] = hex64(m.dataset_fingerprint);
  j["version"] = m.version;
  j["master_seed"] = m.master_seed;
  return j;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string RunManifest::hash() const { return hex64(fnv1a(manifest_body(*this, true).dump())); }

std::string RunManifest::to_json() const {
  auto j = manifest_body(*this, false);
  j["timestamp"] = timestamp;
  j["manifest_hash"] = hash();
  return j.dump(2) + "\n";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string format_results_csv(const std::vector<AuditRecord>& records,
                               const std::string& manifest_hash) {
  std::ostringstream out;
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  out << "run,beta_pos,beta_neg,nu,classifier,lambda,err,spd,eod,n_train_effective,degenerate,seed,"
         "sweep\n";
  for (const auto& r : records) {
    out << r.run << ',' << format_number(r.setting.beta_pos) << ','
        << format_number(r.setting.beta_neg) << ',' << format_number(r.setting.nu) << ','
        << to_string(r.classifier) << ',' << format_optional(r.lambda) << ','
        << format_optional(r.err) << ',' << format_optional(r.spd) << ','
        << format_optional(r.eod) << ',' << r.n_train_effective << ',' << (r.degenerate ? 1 : 0)
        << ',' << r.cell_seed << ',' << to_string(r.sweep) << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError("results.csv: bad number '" + s + "'");
  return v;
}

template <typename T>
T to_integer(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError("results.csv: bad integer '" + s + "'");
  return v;
}

std::optional<double> to_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

}  // namespace

std::vector<AuditRecord> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<AuditRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line.rfind("run,beta_pos,beta_neg,nu,classifier", 0) != 0) {
        throw InputError("results.csv: unexpected header");
      }
      header = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw InputError("results.csv: expected 13 fields, got " + std::to_string(f.size()));
    AuditRecord r;
    r.run = to_integer<int>(f[0]);
    r.setting.beta_pos = to_double(f[1]);
    r.setting.beta_neg = to_double(f[2]);
    r.setting.nu = to_double(f[3]);
    r.classifier = parse_classifier_id(f[4]);
    r.lambda = to_optional(f[5]);
    r.err = to_optional(f[6]);
    r.spd = to_optional(f[7]);
    r.eod = to_optional(f[8]);
    r.n_train_effective = to_integer<std::size_t>(f[9]);
    r.degenerate = f[10] == "1";
    r.cell_seed = to_integer<std::uint64_t>(f[11]);
    r.sweep = sweep_from_string(f[12]);
    out.push_back(r);
  }
  if (!header) throw InputError("results.csv: missing header");
  return out;
}

AuditRecord quantize(const AuditRecord& r) {
  auto q = [](double v) { return to_double(format_number(v)); };
  auto qo = [&](const std::optional<double>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return q(*v);
  };
  AuditRecord out = r;
  out.setting.beta_pos = q(r.setting.beta_pos);
  out.setting.beta_neg = q(r.setting.beta_neg);
  out.setting.nu = q(r.setting.nu);
  out.lambda = qo(r.lambda);
  out.err = qo(r.err);
  out.spd = qo(r.spd);
  out.eod = qo(r.eod);
  out.test_hash = 0;
  return out;
}

std::string format_report_csv(const FairnessReport& rep, const std::string& manifest_hash) {
  std::ostringstream out;
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  out << "# records=" << rep.records << " degenerate=" << rep.degenerate_records << '\n';
  out << "sweep,classifier,lambda,err_mean,err_std,spd_mean,spd_std,eod_mean,eod_std,cells,"
         "excluded\n";
  if (rep.baseline) {
    out << "baseline,base_lr,," << format_number(rep.baseline->err) << ",0,"
        << format_number(rep.baseline->spd) << ",0," << format_number(rep.baseline->eod)
        << ",0,,\n";
  }
  for (const auto sweep : {Sweep::kBeta, Sweep::kLabel}) {
    for (const auto& s : sweep == Sweep::kBeta ? rep.beta_sweep : rep.label_sweep) {
      const std::size_t excluded = std::max({s.err.excluded, s.spd.excluded, s.eod.excluded});
      out << to_string(sweep) << ',' << to_string(s.classifier) << ',' << format_optional(s.lambda)
          << ',' << format_number(s.err.mean) << ',' << format_number(s.err.stddev) << ','
          << format_number(s.spd.mean) << ',' << format_number(s.spd.stddev) << ','
          << format_number(s.eod.mean) << ',' << format_number(s.eod.stddev) << ','
          << s.err.cells << ',' << excluded << '\n';
    }
  }
  return out.str();
}

std::string format_report_table(const FairnessReport& rep) {
  std::ostringstream out;
  char buf[256];
  out << "records: " << rep.records << ", degenerate: " << rep.degenerate_records << '\n';
  if (rep.baseline) {
    std::snprintf(buf, sizeof buf, "baseline (base_lr, unbiased): err %.4f  spd %.4f  eod %.4f\n",
                  rep.baseline->err, rep.baseline->spd, rep.baseline->eod);
    out << buf;
  }
  for (const auto sweep : {Sweep::kBeta, Sweep::kLabel}) {
    const auto& table = sweep == Sweep::kBeta ? rep.beta_sweep : rep.label_sweep;
    if (table.empty()) continue;
    out << '\n' << (sweep == Sweep::kBeta ? "under-representation sweep" : "label-bias sweep") << '\n';
    std::snprintf(buf, sizeof buf, "%-12s %7s  %-17s  %-17s  %-17s  %5s %4s\n", "classifier",
                  "lambda", "err", "spd", "eod", "cells", "excl");
    out << buf;
    for (const auto& s : table) {
      const std::string lam = s.lambda ? format_number(*s.lambda) : "-";
      std::snprintf(buf, sizeof buf,
                    "%-12s %7s  %.4f +- %.4f  %.4f +- %.4f  %.4f +- %.4f  %5zu %4zu\n",
                    to_string(s.classifier).c_str(), lam.c_str(), s.err.mean, s.err.stddev,
                    s.spd.mean, s.spd.stddev, s.eod.mean, s.eod.stddev, s.err.cells,
                    std::max({s.err.excluded, s.spd.excluded, s.eod.excluded}));
      out << buf;
    }
  }
  return out.str();
}

std::string format_heatmap_csv(const HeatmapMatrix& hm, const std::string& manifest_hash) {
  std::ostringstream out;
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  out << "beta_pos\\beta_neg";
  for (double bn : hm.beta_neg) out << ',' << format_number(bn);
  out << '\n';
  for (std::size_t r = 0; r < hm.rows(); ++r) {
    out << format_number(hm.beta_pos[r]);
    for (std::size_t c = 0; c < hm.cols(); ++c) out << ',' << format_optional(hm.at(r, c));
    out << '\n';
  }
  return out.str();
}

double bounding_box_area(const std::vector<AuditRecord>& records, Metric unfairness) {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  std::size_t n = 0;
  for (const auto& r : records) {
    const auto u = metric_of(r, unfairness);
    if (!u || !r.err) continue;
    if (n == 0) {
      x0 = x1 = *u;
      y0 = y1 = *r.err;
    } else {
      x0 = std::min(x0, *u);
      x1 = std::max(x1, *u);
      y0 = std::min(y0, *r.err);
      y1 = std::max(y1, *r.err);
    }
    ++n;
  }
  return n < 2 ? 0.0 : (x1 - x0) * (y1 - y0);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double bias_strength(const AuditRecord& r) {
  if (r.sweep == Sweep::kLabel) return r.setting.nu;
  return 1.0 - std::min(r.setting.beta_pos, r.setting.beta_neg);
}

}  // namespace

std::string render_scatter_svg(const std::vector<AuditRecord>& records, Metric unfairness,
                               const Baseline* baseline, const std::string& title) {
  constexpr double kW = 480, kH = 360, kL = 56, kR = 16, kT = 32, kB = 44;
  double xmax = 0.0, ymax = 0.0;
  for (const auto& r : records) {
    if (const auto u = metric_of(r, unfairness)) xmax = std::max(xmax, *u);
    if (r.err) ymax = std::max(ymax, *r.err);
  }
  if (baseline) {
    xmax = std::max(xmax, baseline->get(unfairness));
    ymax = std::max(ymax, baseline->err);
  }
  xmax = xmax > 0 ? xmax * 1.1 : 1.0;
  ymax = ymax > 0 ? ymax * 1.1 : 1.0;
  auto px = [&](double v) { return kL + v / xmax * (kW - kL - kR); };
  auto py = [&](double v) { return kH - kB - v / ymax * (kH - kT - kB); };

  std::ostringstream out;
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(title) << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                kL, kH - kB, kW - kR, kH - kB, kL, kT, kL, kH - kB);
  out << buf;
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmax * t / 4.0;
    const double yv = ymax * t / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                  px(xv), kH - kB + 14, xv, kL - 4, py(yv) + 4, yv);
    out << buf;
  }
  out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\">"
      << to_string(unfairness) << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 14 %.1f)\">"
                "error rate</text>\n",
                (kT + kH - kB) / 2, (kT + kH - kB) / 2);
  out << buf;
  if (baseline) {
    const double bx = px(baseline->get(unfairness));
    const double by = py(baseline->err);
    std::snprintf(buf, sizeof buf,
                  "<line class=\"baseline\" x1=\"%.1f\" y1=\"%g\" x2=\"%.1f\" y2=\"%g\" stroke=\"#1f4fd6\"/>\n"
                  "<line class=\"baseline\" x1=\"%g\" y1=\"%.1f\" x2=\"%g\" y2=\"%.1f\" stroke=\"#1f4fd6\"/>\n",
                  bx, kT, bx, kH - kB, kL, by, kW - kR, by);
    out << buf;
  }
  for (const auto& r : records) {
    const auto u = metric_of(r, unfairness);
    if (!u || !r.err) continue;
    const double k = std::clamp(bias_strength(r), 0.0, 1.0);
    const int red = static_cast<int>(180 + 70 * k);
    const int green = static_cast<int>(60 + 150 * k);
    const int blue = static_cast<int>(20 + 170 * k);
    std::snprintf(buf, sizeof buf,
                  "<circle class=\"marker\" cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"rgb(%d,%d,%d)\" "
                  "stroke=\"#555\" stroke-width=\"0.3\"/>\n",
                  px(*u), py(*r.err), red, green, blue);
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_heatmap_svg(const HeatmapMatrix& hm, const std::string& title) {
  constexpr double kCell = 56, kL = 70, kT = 48;
  const double w = kL + kCell * static_cast<double>(hm.cols()) + 20;
  const double h = kT + kCell * static_cast<double>(hm.rows()) + 48;
  double vmax = 0.0;
  for (const auto& c : hm.cells) {
    if (c) vmax = std::max(vmax, *c);
  }
  std::ostringstream out;
  char buf[320];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"white\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#888\" stroke-width=\"2\"/>"
         "</pattern></defs>\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(title) << "</text>\n";
  for (std::size_t r = 0; r < hm.rows(); ++r) {
    for (std::size_t c = 0; c < hm.cols(); ++c) {
      const double x = kL + kCell * static_cast<double>(c);
      const double y = kT + kCell * static_cast<double>(r);
      const auto& v = hm.at(r, c);
      if (!v) {
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"missing\" x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"url(#hatch)\" "
                      "stroke=\"white\"/>\n",
                      x, y, kCell, kCell);
        out << buf;
        continue;
      }
      const double k = vmax > 0 ? *v / vmax : 0.0;
      const int g = static_cast<int>(30 + 200 * k);
      std::snprintf(buf, sizeof buf,
                    "<rect class=\"cell\" x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"rgb(%d,%d,%d)\" "
                    "stroke=\"white\"/>\n"
                    "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" fill=\"%s\">%.3f</text>\n",
                    x, y, kCell, kCell, g / 3, g / 2 + 20, g, x + kCell / 2, y + kCell / 2 + 4,
                    k > 0.5 ? "black" : "white", *v);
      out << buf;
    }
  }
  for (std::size_t c = 0; c < hm.cols(); ++c) {
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                  kL + kCell * (static_cast<double>(c) + 0.5), kT - 6,
                  format_number(hm.beta_neg[c]).c_str());
    out << buf;
  }
  for (std::size_t r = 0; r < hm.rows(); ++r) {
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s</text>\n",
                  kL - 6, kT + kCell * (static_cast<double>(r) + 0.5) + 4,
                  format_number(hm.beta_pos[r]).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">\xCE\xB2_neg</text>\n"
                "<text x=\"14\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 14 %g)\">"
                "\xCE\xB2_pos</text>\n",
                kL + kCell * static_cast<double>(hm.cols()) / 2, h - 16,
                kT + kCell * static_cast<double>(hm.rows()) / 2,
                kT + kCell * static_cast<double>(hm.rows()) / 2);
  out << buf << "</svg>\n";
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fairshift
