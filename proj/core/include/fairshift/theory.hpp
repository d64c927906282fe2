#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairshift/dataset.hpp"
#include "fairshift/fair_weights.hpp"
#include "fairshift/gaussian.hpp"
#include "fairshift/logistic.hpp"

namespace fairshift {

// A support point x in group s carrying joint mass P(x, y = 0, s) and
// P(x, y = 1, s).
struct Atom {
  int s = 0;
  Eigen::VectorXd x;
  std::array<double, 2> mass{};

  double total() const noexcept { return mass[0] + mass[1]; }
  double eta() const noexcept { return mass[1] / total(); }
};

// Finite joint distribution over (X, Y, S). Atoms are stored group 0 first.
class DiscreteJointModel {
 public:
  // Masses must be nonnegative, every atom must carry positive mass, and the
  // total must be 1 within 1e-12.
  explicit DiscreteJointModel(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t dim() const noexcept;
  PerSubgroup<double> subgroup_probs() const;
  // min p_ys / max p_ys
  double imbalance_alpha() const;
  double base_rate() const;

  // (1,0) mass scaled by beta_pos, (0,0) mass by beta_neg, renormalized.
  DiscreteJointModel biased(double beta_pos, double beta_neg) const;

 private:
  std::vector<Atom> atoms_;
};

// `points_per_group` atoms per group with N(0, I) features and cell masses
// proportional to -log U. With `balanced`, every subgroup gets mass 1/4.
DiscreteJointModel random_discrete_model(std::uint64_t seed, std::size_t points_per_group = 16,
                                         std::size_t dim = 2, bool balanced = false);

enum class LossKind { kZeroOne, kLog };
enum class BiasSide { kPos, kNeg };

std::string to_string(LossKind k);
std::string to_string(BiasSide b);

// Loss of a linear scorer on one labeled point. Zero-one thresholds the
// score at 1/2; log loss clamps the score away from 0 and 1.
double pointwise_loss(const LinearScorer& f, const Eigen::VectorXd& x, int s, int y, LossKind loss);

// Sum over atoms and labels of mass * loss.
double expected_loss_direct(const DiscreteJointModel& m, const LinearScorer& f, LossKind loss);
// E[L | Y=y, S=s] per subgroup.
PerSubgroup<double> conditional_losses(const DiscreteJointModel& m, const LinearScorer& f,
                                       LossKind loss);
// sum_ys p_ys E[L | y, s]
double expected_loss_by_subgroup(const DiscreteJointModel& m, const LinearScorer& f, LossKind loss);

struct SandwichResult {
  double lhs = 0.0;
  double mid = 0.0;
  double rhs = 0.0;
  double alpha = 0.0;
  bool holds = false;
};

// lhs = alpha^2/4 E_D[L], mid = E_{D_beta}[W_ys L] with W from the biased
// marginals, rhs = 4/alpha E_D[L]. Slack 1e-12 relative to rhs.
SandwichResult check_sandwich(const DiscreteJointModel& model, const LinearScorer& f, double beta,
                              BiasSide side, LossKind loss);

LinearScorer random_linear_scorer(std::size_t dim, std::uint64_t seed);

struct RecoveryResult {
  // Mass-weighted agreement on D between the fair Bayes optimal classifier
  // and the weighted-risk minimizer on D_beta.
  double agreement = 0.0;
  std::array<double, 2> fair_thresholds{};
  std::array<double, 2> chosen_cutoffs{};
};

// Throws std::domain_error at singular lambda.
RecoveryResult check_recovery_thm3(const DiscreteJointModel& model, double beta, double lambda,
                                   FairConstraint constraint, BiasSide side = BiasSide::kPos,
                                   int tie_break = 1);

struct SymmetryResult {
  // max |eta_biased - eta| per group
  std::array<double, 2> max_posterior_gap{};
  // Bayes predictions that changed, per group
  std::array<std::size_t, 2> changed{};
  std::size_t points = 0;

  bool holds(double tol = 1e-12) const {
    return max_posterior_gap[0] <= tol && max_posterior_gap[1] <= tol && changed[0] == 0 &&
           changed[1] == 0;
  }
};

SymmetryResult check_symmetry_lemma1(const DiscreteJointModel& model, double beta_pos,
                                     double beta_neg);
// Evaluated on `points` draws from the unbiased model.
SymmetryResult check_symmetry_lemma1(const GaussianSubgroupModel& model, double beta_pos,
                                     double beta_neg, std::size_t points, std::uint64_t seed);

struct LimitsResult {
  // Closed-form group-0 output; nullopt when lambda is singular.
  std::optional<int> expected;
  std::size_t points = 0;
  std::size_t mismatches = 0;

  bool skipped() const noexcept { return !expected.has_value(); }
  bool holds() const noexcept { return expected && mismatches == 0; }
};

// Limit of the group-0 plug-in output as the chosen beta goes to 0:
//   pos, SPD: [lambda > 1]      pos, EOD: 0
//   neg, SPD: [lambda > -1]     neg, EOD: [lambda > -P(Y=1)]
// P(Y=1) is taken on the biased model. nullopt at the singular lambda.
std::optional<int> lemma2_closed_form(double lambda, BiasSide side, FairConstraint constraint,
                                      double base_rate);

LimitsResult check_limits_lemma2(const DiscreteJointModel& model, double lambda, double tiny_beta,
                                 BiasSide side, FairConstraint constraint);

// 128 ln(2/delta) / (alpha^6 beta^2 eps^2). Throws std::invalid_argument
// outside alpha, beta in (0, 1], eps > 0, delta in (0, 1).
double sample_complexity_bound(double alpha, double beta, double eps, double delta);
std::uint64_t sample_complexity(double alpha, double beta, double eps, double delta);

// 16/(alpha^3 beta) sqrt(ln(2/delta) / 2N) + 16/alpha^3 * bayes_risk
double thm5_bound(double alpha, double beta, std::uint64_t n, double delta, double bayes_risk);

// 0/1 risk of the Bayes classifier (eta > 1/2) on the model.
double bayes_risk(const DiscreteJointModel& model);

struct Thm5Result {
  std::size_t trials = 0;
  std::size_t violations = 0;
  // Samples redrawn because a subgroup came out empty.
  std::size_t resamples = 0;
  double bound = 0.0;
  double bayes_risk = 0.0;
  double max_risk = 0.0;

  double violation_rate() const {
    return trials ? static_cast<double>(violations) / static_cast<double>(trials) : 0.0;
  }
};

// Each trial draws N points from the beta_pos-biased model, minimizes the
// empirically reweighed 0/1 risk over group-threshold classifiers, and
// compares its exact risk on D with the bound.
Thm5Result check_bound_thm5(const DiscreteJointModel& model, double beta, std::uint64_t n,
                            double delta, std::size_t trials, std::uint64_t seed);

}  // namespace fairshift
