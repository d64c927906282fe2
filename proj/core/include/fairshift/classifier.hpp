#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairshift/bias.hpp"
#include "fairshift/dataset.hpp"
#include "fairshift/expgrad.hpp"
#include "fairshift/fair_weights.hpp"
#include "fairshift/gaussian.hpp"
#include "fairshift/logistic.hpp"

namespace fairshift {

enum class ClassifierId { kBaseLr, kRew, kPluginSpd, kPluginEod, kThm3Spd, kThm3Eod, kExpgrad };

std::string to_string(ClassifierId id);
// Throws InputError for an unknown id.
ClassifierId parse_classifier_id(const std::string& s);
std::vector<ClassifierId> parse_classifier_list(const std::string& csv);
// Plug-in and bias-corrected classifiers are trained once per lambda.
bool uses_lambda(ClassifierId id);

struct ClassifierConfig {
  LrConfig lr;
  ExpgradConfig expgrad;
  int tie_break = 1;
  std::vector<double> lambdas = {-0.8, -0.4, -0.2, 0.0, 0.2, 0.4, 0.8};
};

// Everything a trainer may use about the cell it is trained in.
struct TrainContext {
  BiasSetting setting;
  // Subgroup probabilities of the unbiased training data.
  PerSubgroup<double> original_probs{};
  double lambda = 0.0;
  // Analytic posterior of the unbiased model; plug-in classifiers then use
  // the exact posterior of the biased training distribution instead of a
  // fitted one.
  const GaussianSubgroupModel* oracle_model = nullptr;
  ClassifierConfig config;
};

// Reweighing: weighted LR with w_i = W_{y_i s_i}.
LrResult train_reweighing(const LabeledDataset& ds, const LrConfig& config = {});

// Weighted LR with the bias-corrected cost weights: rows with y = 1 take the
// group's FN weight, rows with y = 0 its FP weight. `beta` is the retention
// ratio beta_pos / beta_neg that produced `ds`.
LrResult train_thm3_corrected(const LabeledDataset& ds, double beta, const TradeoffParams& params,
                              const PerSubgroup<double>& subgroup_probs_of_original,
                              const LrConfig& config = {});

// Posterior of the training distribution a plug-in classifier sees: the
// beta-biased model, with the label-flip proportion applied to group 0.
double oracle_eta(const GaussianSubgroupModel& model, const BiasSetting& setting,
                  const Eigen::Ref<const Eigen::VectorXd>& x, int s);

class TrainedClassifier {
 public:
  ClassifierId id() const noexcept { return id_; }
  std::optional<double> lambda() const noexcept { return lambda_; }
  bool converged() const noexcept { return converged_; }

  // Binary predictions; `seed` drives randomized classifiers only.
  std::vector<std::uint8_t> predict(const LabeledDataset& ds, std::uint64_t seed) const;

  friend TrainedClassifier train_classifier(ClassifierId id, const LabeledDataset& train,
                                            const TrainContext& ctx);

 private:
  ClassifierId id_ = ClassifierId::kBaseLr;
  std::optional<double> lambda_;
  bool converged_ = true;
  LinearScorer scorer_;
  TradeoffParams tradeoff_;
  std::optional<GaussianSubgroupModel> oracle_;
  BiasSetting oracle_setting_;
  RandomizedClassifier mixture_;
};

// Throws DegenerateSubgroupError when the training data cannot support the
// classifier (e.g. an empty subgroup for reweighing).
TrainedClassifier train_classifier(ClassifierId id, const LabeledDataset& train,
                                   const TrainContext& ctx);

// Plain-text `key = value` dump of a linear scorer.
std::string dump_scorer(const LinearScorer& scorer, const std::vector<std::string>& feature_names);

}  // namespace fairshift
