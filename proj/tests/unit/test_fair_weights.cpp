#include <gtest/gtest.h>

#include <cmath>

#include "fairshift/error.hpp"
#include "fairshift/fair_weights.hpp"
#include "helpers.hpp"

using namespace fairshift;

TEST(ReweighWeightsTest, IndependenceGivesOnes) {
  const auto w = reweigh_weights_from_counts({25, 25, 25, 25});
  for (double v : w.w) EXPECT_EQ(v, 1.0);
}

TEST(ReweighWeightsTest, CountedExample) {
  // counts (00:40, 01:20, 10:10, 11:30)
  const auto w = reweigh_weights(fairshift::testing::dataset_with_counts({40, 20, 10, 30}));
  EXPECT_EQ(w(0, 0), 0.75);
  EXPECT_EQ(w(0, 1), 1.5);
  EXPECT_EQ(w(1, 0), 2.0);
  EXPECT_EQ(w(1, 1), 2.0 / 3.0);
}

TEST(ReweighWeightsTest, ScaleInvariantAndProbForm) {
  const auto a = reweigh_weights_from_counts({40, 20, 10, 30});
  const auto b = reweigh_weights_from_counts({400, 200, 100, 300});
  EXPECT_EQ(a.w, b.w);
  const auto c = reweigh_weights_from_probs({0.4, 0.2, 0.1, 0.3});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(c.w[k], a.w[k], 1e-15);
}

TEST(ReweighWeightsTest, EmptySubgroupThrows) {
  EXPECT_THROW(reweigh_weights_from_counts({4, 0, 3, 3}), DegenerateSubgroupError);
}

TEST(CorrectedWeightsSpd, Examples) {
  auto w = corrected_weights_spd(1.0, 0.0);
  for (int s : {0, 1}) {
    EXPECT_EQ(w.fp[s], 0.5);
    EXPECT_EQ(w.fn[s], 0.5);
  }
  w = corrected_weights_spd(0.5, 0.0);
  EXPECT_NEAR(w.fp[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.fn[0], 2.0 / 3.0, 1e-15);
  w = corrected_weights_spd(1.0, 0.5);
  EXPECT_NEAR(w.fp[1], 0.75, 1e-15);
  EXPECT_NEAR(w.fn[1], 0.25, 1e-15);
  EXPECT_NEAR(w.fp[0], 0.25, 1e-15);
  EXPECT_NEAR(w.fn[0], 0.75, 1e-15);
  EXPECT_THROW(corrected_weights_spd(0.5, 1.0), std::domain_error);
}

TEST(CorrectedWeightsSpd, MatchesClosedFormForGroupZero) {
  for (double beta : {0.1, 0.3, 0.7, 1.0}) {
    for (double lambda : {-0.9, -0.2, 0.0, 0.4, 0.95}) {
      const auto w = corrected_weights_spd(beta, lambda);
      EXPECT_NEAR(w.fp[0], 1.0 / ((1 + lambda) / (beta * (1 - lambda)) + 1), 1e-12);
      EXPECT_NEAR(w.fp[1], 0.5 * (1 + lambda), 1e-12);
    }
  }
}

TEST(CorrectedWeightsEod, Examples) {
  auto w = corrected_weights_eod(1.0, 0.0, 0.25, 0.25);
  for (int s : {0, 1}) {
    EXPECT_EQ(w.fp[s], 0.5);
    EXPECT_EQ(w.fn[s], 0.5);
  }
  w = corrected_weights_eod(0.5, 0.0, 0.25, 0.25);
  EXPECT_NEAR(w.fp[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.fn[0], 2.0 / 3.0, 1e-15);
  w = corrected_weights_eod(1.0, 0.1, 0.25, 0.25);
  EXPECT_NEAR(w.fp[1], 1.0 / (2.0 * (1.0 - 0.1)), 1e-15);
  EXPECT_NEAR(w.fn[1], 1.0 - 1.0 / (2.0 * (1.0 - 0.1)), 1e-15);
  EXPECT_THROW(corrected_weights_eod(1.0, 1.0, 0.25, 0.25), std::domain_error);
}

TEST(CorrectedWeights, PairsSumToOne) {
  for (double beta : {0.05, 0.2, 0.6, 1.0}) {
    for (double lambda : {-1.5, -0.7, -0.1, 0.0, 0.3, 0.9, 1.7}) {
      for (auto c : {FairConstraint::kSpd, FairConstraint::kEod}) {
        if (c == FairConstraint::kSpd && lambda == 1.0) continue;
        const auto w = corrected_weights(c, beta, lambda, 0.2, 0.35);
        for (int s : {0, 1}) {
          EXPECT_NEAR(w.fp[s] + w.fn[s], 1.0, 1e-12);
          EXPECT_GE(w.fp[s], 0.0);
          EXPECT_GE(w.fn[s], 0.0);
        }
      }
    }
  }
}

TEST(BiasedThreshold, InvertsPosteriorShift) {
  // eta_b = r eta / (r eta + 1 - eta) for retention ratio r
  for (double r : {0.1, 0.5, 2.0}) {
    for (double t : {0.2, 0.5, 0.8}) {
      const double c = biased_threshold(t, r);
      EXPECT_NEAR(c, r * t / (r * t + 1 - t), 1e-15);
    }
  }
  EXPECT_EQ(biased_threshold(1.3, 0.5), 1.0);
  EXPECT_EQ(biased_threshold(-0.1, 0.5), 0.0);
}

TEST(PluginFairPredict, LambdaZeroIsBayes) {
  for (auto c : {FairConstraint::kSpd, FairConstraint::kEod}) {
    TradeoffParams tp{0.0, c, 0.37, 1};
    for (double eta : {0.0, 0.1, 0.49, 0.5, 0.51, 0.9, 1.0}) {
      for (int s : {0, 1}) EXPECT_EQ(plugin_fair_predict(eta, s, tp), eta >= 0.5 ? 1 : 0);
    }
  }
}

TEST(PluginFairPredict, SpdExample) {
  TradeoffParams tp{0.4, FairConstraint::kSpd, 0.5, 1};
  EXPECT_NEAR(fair_adjusted_score(0.6, 0, tp), 0.3, 1e-15);
  EXPECT_EQ(plugin_fair_predict(0.6, 0, tp), 1);
  EXPECT_LT(fair_adjusted_score(0.6, 1, tp), 0.0);
  EXPECT_EQ(plugin_fair_predict(0.6, 1, tp), 0);
}

TEST(PluginFairPredict, EodExample) {
  TradeoffParams tp{0.2, FairConstraint::kEod, 0.5, 1};
  EXPECT_NEAR(fair_adjusted_score(0.4, 0, tp), -0.02, 1e-15);
  EXPECT_EQ(plugin_fair_predict(0.4, 0, tp), 0);
}

TEST(PluginFairPredict, TieBreak) {
  TradeoffParams tp{0.0, FairConstraint::kSpd, 0.5, 0};
  EXPECT_EQ(plugin_fair_predict(0.5, 0, tp), 0);
  tp.tie_break = 1;
  EXPECT_EQ(plugin_fair_predict(0.5, 0, tp), 1);
}

TEST(PluginFairPredict, SpdMonotoneInLambda) {
  for (double eta = 0.0; eta <= 1.0; eta += 0.01) {
    int prev0 = -1, prev1 = 2;
    for (double lambda = -1.0; lambda <= 1.0; lambda += 0.05) {
      TradeoffParams tp{lambda, FairConstraint::kSpd, 0.5, 1};
      const int p0 = plugin_fair_predict(eta, 0, tp);
      const int p1 = plugin_fair_predict(eta, 1, tp);
      EXPECT_GE(p0, prev0);
      EXPECT_LE(p1, prev1);
      prev0 = p0;
      prev1 = p1;
    }
  }
}

TEST(FairThreshold, AgreesWithAdjustedScore) {
  for (auto c : {FairConstraint::kSpd, FairConstraint::kEod}) {
    for (double lambda : {-0.6, 0.0, 0.3, 0.7}) {
      TradeoffParams tp{lambda, c, 0.4, 0};
      for (int s : {0, 1}) {
        const double t = fair_threshold(tp, s);
        for (double eta = 0.0; eta <= 1.0; eta += 0.01) {
          EXPECT_EQ(plugin_fair_predict(eta, s, tp), eta > t ? 1 : 0) << eta << " " << t;
        }
      }
    }
  }
}
