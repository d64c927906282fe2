#include "fairshift/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fairshift/error.hpp"
#include "fairshift/rng.hpp"

namespace fairshift {

DiscreteJointModel::DiscreteJointModel(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("DiscreteJointModel: no atoms");
  double total = 0.0;
  const auto d = atoms_.front().x.size();
  for (const auto& a : atoms_) {
    if (a.s != 0 && a.s != 1) throw std::invalid_argument("DiscreteJointModel: group must be 0 or 1");
    if (a.x.size() != d) throw std::invalid_argument("DiscreteJointModel: ragged support");
    if (!(a.mass[0] >= 0.0 && a.mass[1] >= 0.0) || !(a.total() > 0.0)) {
      throw std::invalid_argument("DiscreteJointModel: atom masses must be nonnegative and not both zero");
    }
    total += a.total();
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("DiscreteJointModel: masses must sum to 1");
  std::stable_sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.s < b.s; });
}

std::size_t DiscreteJointModel::dim() const noexcept {
  return static_cast<std::size_t>(atoms_.front().x.size());
}

PerSubgroup<double> DiscreteJointModel::subgroup_probs() const {
  PerSubgroup<double> p{};
  for (const auto& a : atoms_) {
    p[subgroup_index(0, a.s)] += a.mass[0];
    p[subgroup_index(1, a.s)] += a.mass[1];
  }
  return p;
}

double DiscreteJointModel::imbalance_alpha() const {
  const auto p = subgroup_probs();
  return *std::min_element(p.begin(), p.end()) / *std::max_element(p.begin(), p.end());
}

double DiscreteJointModel::base_rate() const {
  const auto p = subgroup_probs();
  return p[subgroup_index(1, 0)] + p[subgroup_index(1, 1)];
}

DiscreteJointModel DiscreteJointModel::biased(double beta_pos, double beta_neg) const {
  if (!(beta_pos > 0.0 && beta_pos <= 1.0) || !(beta_neg > 0.0 && beta_neg <= 1.0)) {
    throw std::invalid_argument("biased: beta must lie in (0, 1]");
  }
  auto atoms = atoms_;
  double total = 0.0;
  for (auto& a : atoms) {
    if (a.s == 0) {
      a.mass[0] *= beta_neg;
      a.mass[1] *= beta_pos;
    }
    total += a.total();
  }
  for (auto& a : atoms) {
    a.mass[0] /= total;
    a.mass[1] /= total;
  }
  return DiscreteJointModel(std::move(atoms));
}

DiscreteJointModel random_discrete_model(std::uint64_t seed, std::size_t points_per_group,
                                         std::size_t dim, bool balanced) {
  if (points_per_group == 0 || dim == 0) throw std::invalid_argument("random_discrete_model: empty support");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Atom> atoms;
  PerSubgroup<double> sums{};
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < points_per_group; ++k) {
      Atom a;
      a.s = s;
      a.x.resize(static_cast<Eigen::Index>(dim));
      for (Eigen::Index j = 0; j < a.x.size(); ++j) a.x[j] = normal(rng);
      for (int y = 0; y < 2; ++y) {
        double u = 0.0;
        while (u <= 0.0) u = unif(rng);
        a.mass[static_cast<std::size_t>(y)] = -std::log(u);
        sums[subgroup_index(y, s)] += a.mass[static_cast<std::size_t>(y)];
      }
      total += a.total();
      atoms.push_back(std::move(a));
    }
  }
  for (auto& a : atoms) {
    for (int y = 0; y < 2; ++y) {
      auto& m = a.mass[static_cast<std::size_t>(y)];
      m = balanced ? 0.25 * m / sums[subgroup_index(y, a.s)] : m / total;
    }
  }
  return DiscreteJointModel(std::move(atoms));
}

std::string to_string(LossKind k) { return k == LossKind::kZeroOne ? "zero-one" : "log"; }
std::string to_string(BiasSide b) { return b == BiasSide::kPos ? "pos" : "neg"; }

double pointwise_loss(const LinearScorer& f, const Eigen::VectorXd& x, int s, int y, LossKind loss) {
  const double q = f.score(x.transpose(), s);
  if (loss == LossKind::kZeroOne) {
    const int pred = q > 0.5 ? 1 : 0;
    return pred == y ? 0.0 : 1.0;
  }
  constexpr double kEps = 1e-15;
  const double qc = std::clamp(q, kEps, 1.0 - kEps);
  return y == 1 ? -std::log(qc) : -std::log(1.0 - qc);
}

double expected_loss_direct(const DiscreteJointModel& m, const LinearScorer& f, LossKind loss) {
  double e = 0.0;
  for (const auto& a : m.atoms()) {
    for (int y = 0; y < 2; ++y) e += a.mass[static_cast<std::size_t>(y)] * pointwise_loss(f, a.x, a.s, y, loss);
  }
  return e;
}

PerSubgroup<double> conditional_losses(const DiscreteJointModel& m, const LinearScorer& f,
                                       LossKind loss) {
  PerSubgroup<double> num{};
  PerSubgroup<double> den{};
  for (const auto& a : m.atoms()) {
    for (int y = 0; y < 2; ++y) {
      const auto k = subgroup_index(y, a.s);
      num[k] += a.mass[static_cast<std::size_t>(y)] * pointwise_loss(f, a.x, a.s, y, loss);
      den[k] += a.mass[static_cast<std::size_t>(y)];
    }
  }
  PerSubgroup<double> out{};
  for (std::size_t k = 0; k < 4; ++k) out[k] = den[k] > 0.0 ? num[k] / den[k] : 0.0;
  return out;
}

double expected_loss_by_subgroup(const DiscreteJointModel& m, const LinearScorer& f, LossKind loss) {
  const auto p = m.subgroup_probs();
  const auto c = conditional_losses(m, f, loss);
  double e = 0.0;
  for (std::size_t k = 0; k < 4; ++k) e += p[k] * c[k];
  return e;
}

namespace {

DiscreteJointModel bias_one_side(const DiscreteJointModel& m, double beta, BiasSide side) {
  return side == BiasSide::kPos ? m.biased(beta, 1.0) : m.biased(1.0, beta);
}

}  // namespace

SandwichResult check_sandwich(const DiscreteJointModel& model, const LinearScorer& f, double beta,
                              BiasSide side, LossKind loss) {
  const auto p = model.subgroup_probs();
  for (double v : p) {
    if (!(v > 0.0)) throw DegenerateSubgroupError("check_sandwich: zero-mass subgroup");
  }
  const auto biased = bias_one_side(model, beta, side);
  const auto w = reweigh_weights_from_probs(biased.subgroup_probs());

  SandwichResult r;
  r.alpha = model.imbalance_alpha();
  const double e_d = expected_loss_direct(model, f, loss);
  for (const auto& a : biased.atoms()) {
    for (int y = 0; y < 2; ++y) {
      r.mid += a.mass[static_cast<std::size_t>(y)] * w(y, a.s) * pointwise_loss(f, a.x, a.s, y, loss);
    }
  }
  r.lhs = r.alpha * r.alpha / 4.0 * e_d;
  r.rhs = 4.0 / r.alpha * e_d;
  const double tol = 1e-12 * std::max(1.0, r.rhs);
  r.holds = r.lhs <= r.mid + tol && r.mid <= r.rhs + tol;
  return r;
}

LinearScorer random_linear_scorer(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LinearScorer f;
  f.weights.resize(static_cast<Eigen::Index>(dim + 1));
  for (Eigen::Index j = 0; j < f.weights.size(); ++j) f.weights[j] = normal(rng);
  f.intercept = normal(rng);
  return f;
}

namespace {

// -inf followed by the distinct values of `v`, ascending.
std::vector<double> cutoff_candidates(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  v.insert(v.begin(), -std::numeric_limits<double>::infinity());
  return v;
}

std::array<std::vector<double>, 2> group_cutoffs(const DiscreteJointModel& m) {
  std::array<std::vector<double>, 2> etas;
  for (const auto& a : m.atoms()) etas[static_cast<std::size_t>(a.s)].push_back(a.eta());
  return {cutoff_candidates(etas[0]), cutoff_candidates(etas[1])};
}

}  // namespace

RecoveryResult check_recovery_thm3(const DiscreteJointModel& model, double beta, double lambda,
                                   FairConstraint constraint, BiasSide side, int tie_break) {
  const auto p = model.subgroup_probs();
  TradeoffParams tp;
  tp.lambda = lambda;
  tp.constraint = constraint;
  tp.base_rate = model.base_rate();
  tp.tie_break = tie_break;

  RecoveryResult res;
  res.fair_thresholds = {fair_threshold(tp, 0), fair_threshold(tp, 1)};
  const double ratio = side == BiasSide::kPos ? beta : 1.0 / beta;
  const auto cw = corrected_weights(constraint, ratio, lambda, p[subgroup_index(1, 0)],
                                    p[subgroup_index(1, 1)]);

  const auto biased = bias_one_side(model, beta, side);
  const auto cutoffs = group_cutoffs(biased);

  // Exact weighted 0/1 risk on D_beta of "predict 1 iff eta_beta > c_s".
  auto risk = [&](double c0, double c1) {
    double r = 0.0;
    for (const auto& a : biased.atoms()) {
      const double c = a.s == 0 ? c0 : c1;
      const auto s = static_cast<std::size_t>(a.s);
      r += a.eta() > c ? cw.fp[s] * a.mass[0] : cw.fn[s] * a.mass[1];
    }
    return r;
  };
  double best = std::numeric_limits<double>::infinity();
  for (double c0 : cutoffs[0]) {
    for (double c1 : cutoffs[1]) {
      const double r = risk(c0, c1);
      if (r < best) {
        best = r;
        res.chosen_cutoffs = {c0, c1};
      }
    }
  }

  double agree = 0.0;
  double total = 0.0;
  const auto& orig = model.atoms();
  const auto& bias = biased.atoms();
  for (std::size_t i = 0; i < orig.size(); ++i) {
    const int fair = plugin_fair_predict(orig[i].eta(), orig[i].s, tp);
    const int brute = bias[i].eta() > res.chosen_cutoffs[static_cast<std::size_t>(bias[i].s)] ? 1 : 0;
    total += orig[i].total();
    if (fair == brute) agree += orig[i].total();
  }
  res.agreement = agree / total;
  return res;
}

SymmetryResult check_symmetry_lemma1(const DiscreteJointModel& model, double beta_pos,
                                     double beta_neg) {
  const auto biased = model.biased(beta_pos, beta_neg);
  SymmetryResult r;
  const auto& orig = model.atoms();
  for (std::size_t i = 0; i < orig.size(); ++i) {
    const auto s = static_cast<std::size_t>(orig[i].s);
    const double e0 = orig[i].eta();
    const double e1 = biased.atoms()[i].eta();
    r.max_posterior_gap[s] = std::max(r.max_posterior_gap[s], std::abs(e1 - e0));
    if ((e0 > 0.5) != (e1 > 0.5)) ++r.changed[s];
    ++r.points;
  }
  return r;
}

SymmetryResult check_symmetry_lemma1(const GaussianSubgroupModel& model, double beta_pos,
                                     double beta_neg, std::size_t points, std::uint64_t seed) {
  const auto biased = biased_model(model, beta_pos, beta_neg);
  const auto ds = sample(model, points, seed);
  SymmetryResult r;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Eigen::VectorXd x = ds.features().row(static_cast<Eigen::Index>(i)).transpose();
    const int s = ds.group(i);
    const auto si = static_cast<std::size_t>(s);
    const double e0 = posterior_eta(model, x, s);
    const double e1 = posterior_eta(biased, x, s);
    r.max_posterior_gap[si] = std::max(r.max_posterior_gap[si], std::abs(e1 - e0));
    if (threshold_predict(e0, 0.5) != threshold_predict(e1, 0.5)) ++r.changed[si];
    ++r.points;
  }
  return r;
}

std::optional<int> lemma2_closed_form(double lambda, BiasSide side, FairConstraint constraint,
                                      double base_rate) {
  if (side == BiasSide::kPos) {
    if (constraint == FairConstraint::kEod) return 0;
    if (lambda == 1.0) return std::nullopt;
    return lambda > 1.0 ? 1 : 0;
  }
  if (constraint == FairConstraint::kSpd) {
    if (lambda == -1.0) return std::nullopt;
    return lambda > -1.0 ? 1 : 0;
  }
  if (lambda == -base_rate) return std::nullopt;
  return lambda > -base_rate ? 1 : 0;
}

LimitsResult check_limits_lemma2(const DiscreteJointModel& model, double lambda, double tiny_beta,
                                 BiasSide side, FairConstraint constraint) {
  if (!(tiny_beta > 0.0 && tiny_beta <= 1e-6)) {
    throw std::invalid_argument("check_limits_lemma2: tiny_beta must lie in (0, 1e-6]");
  }
  const auto biased = bias_one_side(model, tiny_beta, side);
  TradeoffParams tp;
  tp.lambda = lambda;
  tp.constraint = constraint;
  tp.base_rate = biased.base_rate();

  LimitsResult r;
  r.expected = lemma2_closed_form(lambda, side, constraint, tp.base_rate);
  if (!r.expected) return r;
  if (constraint == FairConstraint::kEod && std::abs(1.0 + lambda / (2.0 * tp.base_rate)) < 1e-12) {
    r.expected.reset();
    return r;
  }
  for (const auto& a : biased.atoms()) {
    if (a.s != 0) continue;
    ++r.points;
    if (plugin_fair_predict(a.eta(), 0, tp) != *r.expected) ++r.mismatches;
  }
  return r;
}

double sample_complexity_bound(double alpha, double beta, double eps, double delta) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  return 128.0 * std::log(2.0 / delta) / (std::pow(alpha, 6) * beta * beta * eps * eps);
}

std::uint64_t sample_complexity(double alpha, double beta, double eps, double delta) {
  return static_cast<std::uint64_t>(std::ceil(sample_complexity_bound(alpha, beta, eps, delta)));
}

double thm5_bound(double alpha, double beta, std::uint64_t n, double delta, double bayes_risk) {
  if (n == 0) throw std::invalid_argument("thm5_bound: N must be positive");
  const double a3 = alpha * alpha * alpha;
  return 16.0 / (a3 * beta) * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n))) +
         16.0 / a3 * bayes_risk;
}

double bayes_risk(const DiscreteJointModel& model) {
  double r = 0.0;
  for (const auto& a : model.atoms()) r += a.eta() > 0.5 ? a.mass[0] : a.mass[1];
  return r;
}

Thm5Result check_bound_thm5(const DiscreteJointModel& model, double beta, std::uint64_t n,
                            double delta, std::size_t trials, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("check_bound_thm5: N must be positive");
  const auto biased = model.biased(beta, 1.0);
  const auto& atoms = biased.atoms();
  const std::size_t cells = atoms.size() * 2;

  // Cell probabilities and suffix masses for sequential binomial draws.
  std::vector<double> prob(cells);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    prob[2 * i] = atoms[i].mass[0];
    prob[2 * i + 1] = atoms[i].mass[1];
  }
  std::vector<double> suffix(cells + 1, 0.0);
  for (std::size_t k = cells; k-- > 0;) suffix[k] = suffix[k + 1] + prob[k];

  Thm5Result res;
  res.trials = trials;
  res.bayes_risk = bayes_risk(model);
  res.bound = thm5_bound(model.imbalance_alpha(), beta, n, delta, res.bayes_risk);
  const auto cutoffs = group_cutoffs(model);

  Rng rng(seed);
  std::vector<std::uint64_t> count(cells);
  for (std::size_t t = 0; t < trials; ++t) {
    PerSubgroup<std::size_t> sub{};
    for (;;) {
      std::uint64_t left = n;
      for (std::size_t k = 0; k < cells; ++k) {
        if (left == 0 || k + 1 == cells) {
          count[k] = left;
          left = 0;
          continue;
        }
        const double q = std::clamp(prob[k] / suffix[k], 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(left, q);
        count[k] = draw(rng);
        left -= count[k];
      }
      sub = {};
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        sub[subgroup_index(0, atoms[i].s)] += count[2 * i];
        sub[subgroup_index(1, atoms[i].s)] += count[2 * i + 1];
      }
      if (std::all_of(sub.begin(), sub.end(), [](std::size_t c) { return c > 0; })) break;
      ++res.resamples;
    }
    const auto w = reweigh_weights_from_counts(sub);

    auto emp_risk = [&](double c0, double c1) {
      double r = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const int s = atoms[i].s;
        const double c = s == 0 ? c0 : c1;
        const bool pos = model.atoms()[i].eta() > c;
        r += pos ? w(0, s) * static_cast<double>(count[2 * i])
                 : w(1, s) * static_cast<double>(count[2 * i + 1]);
      }
      return r;
    };
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 2> chosen{};
    for (double c0 : cutoffs[0]) {
      for (double c1 : cutoffs[1]) {
        const double r = emp_risk(c0, c1);
        if (r < best) {
          best = r;
          chosen = {c0, c1};
        }
      }
    }
    double risk = 0.0;
    for (const auto& a : model.atoms()) {
      risk += a.eta() > chosen[static_cast<std::size_t>(a.s)] ? a.mass[0] : a.mass[1];
    }
    res.max_risk = std::max(res.max_risk, risk);
    if (risk > res.bound) ++res.violations;
  }
  return res;
}

}  // namespace fairshift
