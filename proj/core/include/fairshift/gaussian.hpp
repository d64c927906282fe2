#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "fairshift/dataset.hpp"

namespace fairshift {

// Four subgroup-conditional isotropic Gaussians N(mu_ys, sigma^2 I) with
// subgroup priors p_ys. Means are drawn once from U(0,1) per entry.
class GaussianSubgroupModel {
 public:
  GaussianSubgroupModel(PerSubgroup<Eigen::VectorXd> means, double sigma,
                        PerSubgroup<double> priors);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(means_[0].size()); }
  double sigma() const noexcept { return sigma_; }
  const PerSubgroup<Eigen::VectorXd>& means() const noexcept { return means_; }
  const Eigen::VectorXd& mean(int y, int s) const { return means_[subgroup_index(y, s)]; }
  const PerSubgroup<double>& priors() const noexcept { return priors_; }
  double prior(int y, int s) const { return priors_[subgroup_index(y, s)]; }

  // P(Y = 1) under the priors.
  double base_rate() const noexcept { return priors_[2] + priors_[3]; }

 private:
  PerSubgroup<Eigen::VectorXd> means_;
  double sigma_;
  PerSubgroup<double> priors_;
};

inline constexpr PerSubgroup<double> kUniformPriors = {0.25, 0.25, 0.25, 0.25};

GaussianSubgroupModel make_model(std::size_t dim, double sigma, const PerSubgroup<double>& priors,
                                 std::uint64_t seed);

// Draws (y, s) from the priors, then x ~ N(mu_ys, sigma^2 I).
LabeledDataset sample(const GaussianSubgroupModel& model, std::size_t n, std::uint64_t seed);

// eta(x, s) = P(Y = 1 | X = x, S = s), evaluated in log space.
double posterior_eta(const GaussianSubgroupModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                     int s);

// The beta-biased distribution: p_10 scaled by beta_pos, p_00 by beta_neg,
// renormalized. Class-conditionals are unchanged.
GaussianSubgroupModel biased_model(const GaussianSubgroupModel& model, double beta_pos,
                                   double beta_neg);

// 1 iff eta > threshold; eta == threshold resolves to tie_break.
int bayes_predict(const GaussianSubgroupModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                  int s, double threshold = 0.5, int tie_break = 1);
int threshold_predict(double eta, double threshold, int tie_break = 1);

// Named synthetic profiles.
struct SyntheticPreset {
  std::string name;
  std::size_t dim = 20;
  std::size_t n_train = 5000;
  std::size_t n_test = 2000;
  double sigma = 1.0;
  PerSubgroup<double> priors = kUniformPriors;

  // "desk": dim 20, 5000/2000. "paper": dim 100, 20000/5000.
  static SyntheticPreset by_name(const std::string& name);
};

struct SyntheticData {
  GaussianSubgroupModel model;
  LabeledDataset train;
  LabeledDataset test;
};

// Model, training and test samples of a preset, each from its own sub-seed
// of `seed`.
SyntheticData materialize(const SyntheticPreset& preset, std::uint64_t seed);

}  // namespace fairshift
