#include "fairshift/gaussian.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fairshift/error.hpp"
#include "fairshift/rng.hpp"

namespace fairshift {

namespace {

void validate_priors(const PerSubgroup<double>& priors) {
  double sum = 0.0;
  for (double p : priors) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("priors must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("priors must sum to 1");
}

}  // namespace

GaussianSubgroupModel::GaussianSubgroupModel(PerSubgroup<Eigen::VectorXd> means, double sigma,
                                             PerSubgroup<double> priors)
    : means_(std::move(means)), sigma_(sigma), priors_(priors) {
  if (!(sigma_ > 0.0)) throw std::invalid_argument("sigma must be positive");
  validate_priors(priors_);
  const auto d = means_[0].size();
  if (d < 1) throw std::invalid_argument("dim must be at least 1");
  for (const auto& m : means_) {
    if (m.size() != d) throw std::invalid_argument("subgroup means differ in dimension");
  }
}

GaussianSubgroupModel make_model(std::size_t dim, double sigma, const PerSubgroup<double>& priors,
                                 std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("dim must be at least 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PerSubgroup<Eigen::VectorXd> means;
  for (auto& m : means) {
    m.resize(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < m.size(); ++k) m[k] = unif(rng);
  }
  return GaussianSubgroupModel(std::move(means), sigma, priors);
}

LabeledDataset sample(const GaussianSubgroupModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
  Rng rng(seed);
  const auto& pr = model.priors();
  std::discrete_distribution<int> pick_subgroup({pr[0], pr[1], pr[2], pr[3]});
  std::normal_distribution<double> noise(0.0, model.sigma());
  const auto d = static_cast<Eigen::Index>(model.dim());
  FeatureMatrix x(static_cast<Eigen::Index>(n), d);
  std::vector<std::uint8_t> y(n);
  std::vector<std::uint8_t> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(pick_subgroup(rng));
    y[i] = static_cast<std::uint8_t>(subgroup_label(k));
    s[i] = static_cast<std::uint8_t>(subgroup_group(k));
    const auto& mu = model.means()[k];
    for (Eigen::Index j = 0; j < d; ++j) {
      x(static_cast<Eigen::Index>(i), j) = mu[j] + noise(rng);
    }
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
  return LabeledDataset(std::move(x), std::move(y), std::move(s), std::move(names));
}

double posterior_eta(const GaussianSubgroupModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                     int s) {
  if (static_cast<std::size_t>(x.size()) != model.dim()) {
    throw std::invalid_argument("posterior_eta: dimension mismatch");
  }
  const double inv2var = 0.5 / (model.sigma() * model.sigma());
  // Shared normalizers of the two Gaussians cancel.
  const double log1 = std::log(model.prior(1, s)) - (x - model.mean(1, s)).squaredNorm() * inv2var;
  const double log0 = std::log(model.prior(0, s)) - (x - model.mean(0, s)).squaredNorm() * inv2var;
  const double z = log1 - log0;
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

GaussianSubgroupModel biased_model(const GaussianSubgroupModel& model, double beta_pos,
                                   double beta_neg) {
  if (!(beta_pos > 0.0 && beta_pos <= 1.0) || !(beta_neg > 0.0 && beta_neg <= 1.0)) {
    throw std::invalid_argument("biased_model: betas must lie in (0, 1]");
  }
  auto pr = model.priors();
  pr[subgroup_index(1, 0)] *= beta_pos;
  pr[subgroup_index(0, 0)] *= beta_neg;
  const double z = pr[0] + pr[1] + pr[2] + pr[3];
  for (auto& p : pr) p /= z;
  return GaussianSubgroupModel(model.means(), model.sigma(), pr);
}

int threshold_predict(double eta, double threshold, int tie_break) {
  if (eta > threshold) return 1;
  if (eta == threshold) return tie_break;
  return 0;
}

int bayes_predict(const GaussianSubgroupModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                  int s, double threshold, int tie_break) {
  return threshold_predict(posterior_eta(model, x, s), threshold, tie_break);
}

SyntheticPreset SyntheticPreset::by_name(const std::string& name) {
  SyntheticPreset p;
  p.name = name;
  if (name == "desk") return p;
  if (name == "paper") {
    p.dim = 100;
    p.n_train = 20000;
    p.n_test = 5000;
    return p;
  }
  throw InputError("unknown synthetic preset: " + name);
}

SyntheticData materialize(const SyntheticPreset& preset, std::uint64_t seed) {
  auto model = make_model(preset.dim, preset.sigma, preset.priors, splitmix64(seed ^ 0x6d6f64656cULL));
  auto train = sample(model, preset.n_train, splitmix64(seed ^ 0x747261696eULL));
  auto test = sample(model, preset.n_test, splitmix64(seed ^ 0x74657374ULL));
  return {std::move(model), std::move(train), std::move(test)};
}

}  // namespace fairshift
