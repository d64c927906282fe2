#include <benchmark/benchmark.h>

#include "fairshift/bias.hpp"
#include "fairshift/expgrad.hpp"
#include "fairshift/gaussian.hpp"
#include "fairshift/logistic.hpp"
#include "fairshift/theory.hpp"

using namespace fairshift;

namespace {

const SyntheticData& desk() {
  static const SyntheticData data = materialize(SyntheticPreset::by_name("desk"), 1);
  return data;
}

void BM_WeightedLr(benchmark::State& state) {
  const auto& train = desk().train;
  const std::vector<double> w(train.size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(train_weighted_lr(train, w));
}
BENCHMARK(BM_WeightedLr)->Unit(benchmark::kMillisecond);

void BM_Expgrad(benchmark::State& state) {
  const auto biased = inject_under_representation(desk().train, 0.5, 1.0, 2);
  ExpgradConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_expgrad(biased, cfg));
}
BENCHMARK(BM_Expgrad)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_InjectUnderRepresentation(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(inject_under_representation(desk().train, 0.3, 0.7, ++seed));
}
BENCHMARK(BM_InjectUnderRepresentation);

void BM_ApplyBias(benchmark::State& state) {
  std::uint64_t seed = 0;
  const BiasSetting setting{0.5, 0.8, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(apply_bias(desk().train, setting, ++seed));
}
BENCHMARK(BM_ApplyBias);

void BM_PosteriorEta(benchmark::State& state) {
  const auto m = make_model(static_cast<std::size_t>(state.range(0)), 1.0, kUniformPriors, 3);
  const Eigen::VectorXd x = m.mean(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_eta(m, x, 0));
}
BENCHMARK(BM_PosteriorEta)->Arg(20)->Arg(100);

void BM_RecoveryCheck(benchmark::State& state) {
  const auto m = random_discrete_model(4);
  for (auto _ : state) benchmark::DoNotOptimize(check_recovery_thm3(m, 0.5, 0.3, FairConstraint::kEod));
}
BENCHMARK(BM_RecoveryCheck);

}  // namespace

BENCHMARK_MAIN();
