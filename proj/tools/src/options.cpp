#include "options.hpp"

#include <chrono>
#include <ctime>

#include "fairshift/error.hpp"
#include "fairshift/kv_config.hpp"

namespace fairshift::cli {

void apply_config_file(CLI::App& sub, const std::string& path) {
  if (path.empty()) return;
  KvConfig cfg;
  try {
    cfg = KvConfig::load(path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  for (const auto& [key, value] : cfg.entries()) {
    auto* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw UsageError("unknown key '" + key + "' in " + path);
    }
    if (opt->count() > 0) continue;
    opt->clear();
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("bad value for '" + key + "' in " + path + ": " + e.what());
    }
  }
}

ResolvedConfig resolved_options(const CLI::App& sub) {
  ResolvedConfig out;
  for (const auto* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    out.emplace_back(name, value);
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fairshift::cli
