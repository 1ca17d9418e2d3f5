#include <benchmark/benchmark.h>

#include "mipt/circuit.hpp"
#include "mipt/observables.hpp"

namespace {

void BM_Step(benchmark::State& state) {
  mipt::CircuitConfig cfg;
  cfg.L = static_cast<std::size_t>(state.range(0));
  cfg.alpha = 4.0;
  cfg.p = static_cast<double>(state.range(1)) / 1000.0;
  const mipt::DistanceSampler sampler(cfg.L, cfg.alpha);
  const auto& group = mipt::CliffordGroup2::instance();
  mipt::Rng rng(1);
  auto t = mipt::Tableau::zero_state(cfg.L);
  for (std::size_t k = 0; k < 2 * cfg.L; ++k) mipt::step(t, cfg, sampler, group, rng);
  for (auto _ : state) mipt::step(t, cfg, sampler, group, rng);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step)->ArgsProduct({{16, 32, 64, 128, 256}, {0, 200}});

void BM_Qcmi(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  mipt::CircuitConfig cfg;
  cfg.L = L;
  cfg.alpha = 4.0;
  cfg.p = 0.2;
  const mipt::DistanceSampler sampler(L, cfg.alpha);
  mipt::Rng rng(2);
  auto t = mipt::Tableau::zero_state(L);
  for (std::size_t k = 0; k < 2 * L; ++k) mipt::step(t, cfg, sampler, mipt::CliffordGroup2::instance(), rng);
  const mipt::PartitionSubsets subsets(mipt::make_partition(L, mipt::Scheme::a));
  for (auto _ : state) benchmark::DoNotOptimize(mipt::qcmi(t, subsets));
}
BENCHMARK(BM_Qcmi)->Arg(16)->Arg(64)->Arg(128)->Arg(256);

}  // namespace
