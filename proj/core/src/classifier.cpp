#include "fairshift/classifier.hpp"

#include <cstdio>
#include <sstream>

#include "fairshift/error.hpp"
#include "fairshift/kv_config.hpp"

namespace fairshift {

std::string to_string(ClassifierId id) {
  switch (id) {
    case ClassifierId::kBaseLr: return "base_lr";
    case ClassifierId::kRew: return "rew";
    case ClassifierId::kPluginSpd: return "plugin_spd";
    case ClassifierId::kPluginEod: return "plugin_eod";
    case ClassifierId::kThm3Spd: return "thm3_spd";
    case ClassifierId::kThm3Eod: return "thm3_eod";
    case ClassifierId::kExpgrad: return "expgrad";
  }
  return "?";
}

ClassifierId parse_classifier_id(const std::string& s) {
  for (auto id : {ClassifierId::kBaseLr, ClassifierId::kRew, ClassifierId::kPluginSpd,
                  ClassifierId::kPluginEod, ClassifierId::kThm3Spd, ClassifierId::kThm3Eod,
                  ClassifierId::kExpgrad}) {
    if (to_string(id) == s) return id;
  }
  throw InputError("unknown classifier id: '" + s + "'");
}

std::vector<ClassifierId> parse_classifier_list(const std::string& csv) {
  std::vector<ClassifierId> out;
  for (const auto& item : split_list(csv)) out.push_back(parse_classifier_id(item));
  if (out.empty()) throw InputError("empty classifier list");
  return out;
}

bool uses_lambda(ClassifierId id) {
  return id == ClassifierId::kPluginSpd || id == ClassifierId::kPluginEod ||
         id == ClassifierId::kThm3Spd || id == ClassifierId::kThm3Eod;
}

LrResult train_reweighing(const LabeledDataset& ds, const LrConfig& config) {
  const auto rw = reweigh_weights(ds);
  std::vector<double> w(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) w[i] = rw(ds.label(i), ds.group(i));
  return train_weighted_lr(ds, w, config);
}

LrResult train_thm3_corrected(const LabeledDataset& ds, double beta, const TradeoffParams& params,
                              const PerSubgroup<double>& p, const LrConfig& config) {
  const auto cw = corrected_weights(params.constraint, beta, params.lambda,
                                    p[subgroup_index(1, 0)], p[subgroup_index(1, 1)]);
  std::vector<double> w(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) w[i] = cw.for_row(ds.label(i), ds.group(i));
  return train_weighted_lr(ds, w, config);
}

double oracle_eta(const GaussianSubgroupModel& model, const BiasSetting& setting,
                  const Eigen::Ref<const Eigen::VectorXd>& x, int s) {
  const double eta = posterior_eta(model, x, s);
  return s == 0 ? (1.0 - setting.nu) * eta : eta;
}

namespace {

double positive_fraction(const LabeledDataset& ds) {
  std::size_t pos = 0;
  for (auto y : ds.labels()) pos += y;
  return static_cast<double>(pos) / static_cast<double>(ds.size());
}

}  // namespace

TrainedClassifier train_classifier(ClassifierId id, const LabeledDataset& train,
                                   const TrainContext& ctx) {
  TrainedClassifier tc;
  tc.id_ = id;
  const auto& lr = ctx.config.lr;
  switch (id) {
    case ClassifierId::kBaseLr: {
      const std::vector<double> w(train.size(), 1.0);
      auto fit = train_weighted_lr(train, w, lr);
      tc.scorer_ = std::move(fit.scorer);
      tc.converged_ = fit.converged;
      break;
    }
    case ClassifierId::kRew: {
      auto fit = train_reweighing(train, lr);
      tc.scorer_ = std::move(fit.scorer);
      tc.converged_ = fit.converged;
      break;
    }
    case ClassifierId::kPluginSpd:
    case ClassifierId::kPluginEod: {
      tc.lambda_ = ctx.lambda;
      tc.tradeoff_.lambda = ctx.lambda;
      tc.tradeoff_.tie_break = ctx.config.tie_break;
      tc.tradeoff_.constraint =
          id == ClassifierId::kPluginSpd ? FairConstraint::kSpd : FairConstraint::kEod;
      if (ctx.oracle_model) {
        tc.oracle_ = biased_model(*ctx.oracle_model, ctx.setting.beta_pos, ctx.setting.beta_neg);
        tc.oracle_setting_ = ctx.setting;
        // P(Y=1) of the biased, label-flipped training distribution.
        const auto& pr = tc.oracle_->priors();
        tc.tradeoff_.base_rate = pr[subgroup_index(1, 1)] +
                                 (1.0 - ctx.setting.nu) * pr[subgroup_index(1, 0)];
      } else {
        const std::vector<double> w(train.size(), 1.0);
        auto fit = train_weighted_lr(train, w, lr);
        tc.scorer_ = std::move(fit.scorer);
        tc.converged_ = fit.converged;
        tc.tradeoff_.base_rate = positive_fraction(train);
      }
      if (tc.tradeoff_.constraint == FairConstraint::kEod &&
          !(tc.tradeoff_.base_rate > 0.0 && tc.tradeoff_.base_rate < 1.0)) {
        throw DegenerateSubgroupError("plugin_eod: training data has a single label");
      }
      break;
    }
    case ClassifierId::kThm3Spd:
    case ClassifierId::kThm3Eod: {
      tc.lambda_ = ctx.lambda;
      TradeoffParams tp;
      tp.lambda = ctx.lambda;
      tp.constraint = id == ClassifierId::kThm3Spd ? FairConstraint::kSpd : FairConstraint::kEod;
      tp.tie_break = ctx.config.tie_break;
      const double ratio = ctx.setting.beta_pos / ctx.setting.beta_neg;
      auto fit = train_thm3_corrected(train, ratio, tp, ctx.original_probs, lr);
      tc.scorer_ = std::move(fit.scorer);
      tc.converged_ = fit.converged;
      break;
    }
    case ClassifierId::kExpgrad: {
      auto cfg = ctx.config.expgrad;
      cfg.lr = lr;
      auto fit = train_expgrad(train, cfg);
      tc.mixture_ = std::move(fit.classifier);
      tc.converged_ = fit.within_tolerance;
      break;
    }
  }
  return tc;
}

std::vector<std::uint8_t> TrainedClassifier::predict(const LabeledDataset& ds,
                                                     std::uint64_t seed) const {
  switch (id_) {
    case ClassifierId::kExpgrad:
      return mixture_.predict(ds, seed);
    case ClassifierId::kPluginSpd:
    case ClassifierId::kPluginEod: {
      std::vector<std::uint8_t> out(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto row = ds.features().row(static_cast<Eigen::Index>(i));
        const double eta = oracle_ ? oracle_eta(*oracle_, oracle_setting_, row.transpose(), ds.group(i))
                                   : scorer_.score(row, ds.group(i));
        out[i] = static_cast<std::uint8_t>(plugin_fair_predict(eta, ds.group(i), tradeoff_));
      }
      return out;
    }
    default:
      return scorer_.predict(ds, 0.5, 1);
  }
}

std::string dump_scorer(const LinearScorer& scorer, const std::vector<std::string>& feature_names) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", scorer.intercept);
  out << "intercept = " << buf << '\n';
  for (Eigen::Index k = 0; k < scorer.weights.size(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const std::string name = idx < feature_names.size() ? feature_names[idx] : "group";
    std::snprintf(buf, sizeof buf, "%.17g", scorer.weights[k]);
    out << "w[" << name << "] = " << buf << '\n';
  }
  return out.str();
}

}  // namespace fairshift
