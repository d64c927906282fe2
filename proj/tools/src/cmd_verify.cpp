#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "fairshift/gaussian.hpp"
#include "fairshift/report.hpp"
#include "fairshift/rng.hpp"
#include "fairshift/theory.hpp"
#include "options.hpp"

namespace fairshift::cli {

CLI::App* add_verify_command(CLI::App& app, VerifyOptions& o) {
  auto* sub = app.add_subcommand("verify", "Numerically check the bias-recovery and stability results");
  sub->add_option("--check", o.check, "sandwich | recovery | symmetry | limits | complexity | thm5")
      ->check(CLI::IsMember({"sandwich", "recovery", "symmetry", "limits", "complexity", "thm5"}));
  sub->add_option("--cases", o.cases, "Number of random cases or models (check-specific default)");
  sub->add_option("--seed", o.seed, "Seed")->capture_default_str();
  sub->add_option("--alpha", o.alpha, "Subgroup imbalance (complexity)")->capture_default_str();
  sub->add_option("--beta", o.beta, "Bias level (complexity, thm5)")->capture_default_str();
  sub->add_option("--eps", o.eps, "Target excess risk (complexity, thm5)")->capture_default_str();
  sub->add_option("--delta", o.delta, "Failure probability (complexity, thm5)")->capture_default_str();
  sub->add_option("--trials", o.trials, "Monte-Carlo trials (thm5)")->capture_default_str();
  sub->add_option("--out", o.out, "Optional directory for manifest.json and verify.jsonl");
  sub->add_option("--config", o.config, "key = value file; command-line flags take precedence");
  return sub;
}

namespace {

using json = nlohmann::ordered_json;

class Emitter {
 public:
  explicit Emitter(std::ostream* file) : file_(file) {}
  void emit(const json& j) {
    const auto line = j.dump();
    std::cout << line << '\n';
    if (file_) *file_ << line << '\n';
  }
  void record(bool pass) {
    ++total_;
    if (pass) ++passed_;
  }
  bool all_passed() const { return passed_ == total_; }
  std::size_t passed() const { return passed_; }
  std::size_t total() const { return total_; }

 private:
  std::ostream* file_;
  std::size_t passed_ = 0;
  std::size_t total_ = 0;
};

void run_sandwich(const VerifyOptions& o, Emitter& em) {
  const int cases = o.cases > 0 ? o.cases : 200;
  for (int c = 0; c < cases; ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    const auto model = random_discrete_model(mix64(o.seed, uc, 0, 0));
    const auto f = random_linear_scorer(model.dim(), mix64(o.seed, uc, 1, 0));
    const double beta = 0.1 * static_cast<double>(c % 10 + 1);
    const auto side = (c / 10) % 2 ? BiasSide::kNeg : BiasSide::kPos;
    const auto loss = (c / 20) % 2 ? LossKind::kLog : LossKind::kZeroOne;
    const auto r = check_sandwich(model, f, beta, side, loss);
    const double gap = std::abs(expected_loss_direct(model, f, loss) -
                                expected_loss_by_subgroup(model, f, loss));
    const bool pass = r.holds && gap <= 1e-12;
    em.record(pass);
    em.emit({{"check", "sandwich"}, {"case", c}, {"beta", beta}, {"side", to_string(side)},
             {"loss", to_string(loss)}, {"alpha", r.alpha}, {"lhs", r.lhs}, {"mid", r.mid},
             {"rhs", r.rhs}, {"expectation_gap", gap}, {"pass", pass}});
  }
}

void run_recovery(const VerifyOptions& o, Emitter& em) {
  const int models = o.cases > 0 ? o.cases : 20;
  for (int m = 0; m < models; ++m) {
    const auto model = random_discrete_model(mix64(o.seed, static_cast<std::uint64_t>(m), 2, 0));
    for (const auto constraint : {FairConstraint::kSpd, FairConstraint::kEod}) {
      for (const double lambda : {-0.5, 0.0, 0.3, 0.8}) {
        for (const double beta : {0.2, 0.5, 1.0}) {
          json j{{"check", "recovery"}, {"model", m}, {"constraint", to_string(constraint)},
                 {"lambda", lambda}, {"beta", beta}};
          try {
            const auto r = check_recovery_thm3(model, beta, lambda, constraint);
            const bool pass = r.agreement == 1.0;
            em.record(pass);
            j["agreement"] = r.agreement;
            j["pass"] = pass;
          } catch (const std::domain_error&) {
            j["skipped"] = "singular lambda";
          }
          em.emit(j);
        }
      }
    }
  }
}

void run_symmetry(const VerifyOptions& o, Emitter& em) {
  const std::size_t points = o.cases > 0 ? static_cast<std::size_t>(o.cases) : 10000;
  const auto data = materialize(SyntheticPreset::by_name("desk"), o.seed);
  for (int k = 1; k <= 10; ++k) {
    const double beta = 0.1 * k;
    const auto r = check_symmetry_lemma1(data.model, beta, beta, points, mix64(o.seed, 3, static_cast<std::uint64_t>(k), 0));
    const bool pass = r.holds();
    em.record(pass);
    em.emit({{"check", "symmetry"}, {"beta_pos", beta}, {"beta_neg", beta}, {"points", r.points},
             {"max_gap_s0", r.max_posterior_gap[0]}, {"max_gap_s1", r.max_posterior_gap[1]},
             {"changed_s0", r.changed[0]}, {"changed_s1", r.changed[1]}, {"pass", pass}});
  }
  // One-sided bias leaves group 1 untouched.
  const auto r = check_symmetry_lemma1(data.model, 0.5, 1.0, points, mix64(o.seed, 3, 0, 1));
  const bool pass = r.max_posterior_gap[1] <= 1e-12 && r.changed[1] == 0;
  em.record(pass);
  em.emit({{"check", "symmetry"}, {"beta_pos", 0.5}, {"beta_neg", 1.0}, {"points", r.points},
           {"max_gap_s0", r.max_posterior_gap[0]}, {"max_gap_s1", r.max_posterior_gap[1]},
           {"changed_s0", r.changed[0]}, {"changed_s1", r.changed[1]}, {"pass", pass}});
}

void run_limits(const VerifyOptions& o, Emitter& em) {
  const int models = o.cases > 0 ? o.cases : 5;
  for (int m = 0; m < models; ++m) {
    const auto model = random_discrete_model(mix64(o.seed, static_cast<std::uint64_t>(m), 4, 0));
    for (const auto side : {BiasSide::kPos, BiasSide::kNeg}) {
      for (const auto constraint : {FairConstraint::kSpd, FairConstraint::kEod}) {
        for (const double lambda : {-2.0, -0.5, 0.0, 0.5, 1.5}) {
          const auto r = check_limits_lemma2(model, lambda, 1e-8, side, constraint);
          json j{{"check", "limits"}, {"model", m}, {"side", to_string(side)},
                 {"constraint", to_string(constraint)}, {"lambda", lambda}};
          if (r.skipped()) {
            j["skipped"] = "singular lambda";
          } else {
            em.record(r.holds());
            j["expected"] = *r.expected;
            j["points"] = r.points;
            j["mismatches"] = r.mismatches;
            j["pass"] = r.holds();
          }
          em.emit(j);
        }
      }
    }
  }
}

void run_complexity(const VerifyOptions& o, Emitter& em) {
  const auto n = sample_complexity(o.alpha, o.beta, o.eps, o.delta);
  em.record(true);
  em.emit({{"check", "complexity"}, {"alpha", o.alpha}, {"beta", o.beta}, {"eps", o.eps},
           {"delta", o.delta}, {"bound", sample_complexity_bound(o.alpha, o.beta, o.eps, o.delta)},
           {"n", n}, {"pass", true}});
}

void run_thm5(const VerifyOptions& o, Emitter& em) {
  const auto model = random_discrete_model(mix64(o.seed, 0, 5, 0), 16, 2, true);
  const auto n = sample_complexity(model.imbalance_alpha(), o.beta, o.eps, o.delta);
  const auto r = check_bound_thm5(model, o.beta, n, o.delta, static_cast<std::size_t>(o.trials),
                                  mix64(o.seed, 0, 5, 1));
  const bool pass = r.violations == 0;
  em.record(pass);
  em.emit({{"check", "thm5"}, {"alpha", model.imbalance_alpha()}, {"beta", o.beta}, {"n", n},
           {"delta", o.delta}, {"trials", r.trials}, {"violations", r.violations},
           {"resamples", r.resamples}, {"bayes_risk", r.bayes_risk}, {"bound", r.bound},
           {"max_risk", r.max_risk}, {"pass", pass}});
}

}  // namespace

int run_verify_command(const VerifyOptions& o, const CLI::App& sub) {
  if (o.check.empty()) throw UsageError("--check is required");
  if (o.trials < 1) throw UsageError("--trials must be positive");
  if (o.check == "complexity" || o.check == "thm5") {
    try {
      (void)sample_complexity_bound(o.alpha, o.beta, o.eps, o.delta);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  std::ofstream file;
  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    RunManifest manifest;
    manifest.subcommand = "verify";
    manifest.config = resolved_options(sub);
    manifest.master_seed = o.seed;
    manifest.timestamp = utc_timestamp();
    write_text_file(dir / "manifest.json", manifest.to_json());
    file.open(dir / "verify.jsonl");
    file << "{\"manifest\":\"" << manifest.hash() << "\"}\n";
  }
  Emitter em(file.is_open() ? &file : nullptr);

  if (o.check == "sandwich") run_sandwich(o, em);
  else if (o.check == "recovery") run_recovery(o, em);
  else if (o.check == "symmetry") run_symmetry(o, em);
  else if (o.check == "limits") run_limits(o, em);
  else if (o.check == "complexity") run_complexity(o, em);
  else run_thm5(o, em);

  em.emit({{"check", o.check}, {"summary", true}, {"passed", em.passed()}, {"total", em.total()},
           {"ok", em.all_passed()}});
  return em.all_passed() ? 0 : 1;
}

}  // namespace fairshift::cli
