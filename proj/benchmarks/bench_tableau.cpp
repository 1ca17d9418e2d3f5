#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "mipt/gf2.hpp"
#include "mipt/tableau.hpp"

namespace {

mipt::Tableau scrambled(std::size_t n, std::uint64_t seed) {
  const auto& group = mipt::CliffordGroup2::instance();
  std::mt19937_64 rng(seed);
  mipt::Tableau t(n);
  for (std::size_t k = 0; k < 8 * n; ++k) {
    const std::size_t i = rng() % n;
    const std::size_t j = (i + 1 + rng() % (n - 1)) % n;
    t.apply(group.compiled(group.sample_index(rng)), i, j);
  }
  return t;
}

void BM_ApplyGate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& group = mipt::CliffordGroup2::instance();
  auto t = scrambled(n, 1);
  std::mt19937_64 rng(2);
  for (auto _ : state) {
    const std::size_t i = rng() % n;
    t.apply(group.compiled(rng() % group.size()), i, (i + 1) % n);
  }
  benchmark::DoNotOptimize(t);
}
BENCHMARK(BM_ApplyGate)->RangeMultiplier(2)->Range(64, 1024);

void BM_MeasureRandom(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& group = mipt::CliffordGroup2::instance();
  auto t = scrambled(n, 3);
  std::mt19937_64 rng(4);
  for (auto _ : state) {
    const std::size_t q = rng() % n;
    t.collapse_z(q, rng() & 1);
    // re-scramble the measured qubit so the next measurement is likely random
    t.apply(group.compiled(rng() % group.size()), q, (q + 1 + rng() % (n - 1)) % n);
  }
  benchmark::DoNotOptimize(t);
}
BENCHMARK(BM_MeasureRandom)->RangeMultiplier(2)->Range(64, 1024);

void BM_HalfEntropy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto t = scrambled(n, 5);
  std::vector<std::size_t> half(n / 2);
  std::iota(half.begin(), half.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(t.entropy(half));
}
BENCHMARK(BM_HalfEntropy)->RangeMultiplier(2)->Range(64, 1024);

void BM_Rank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  mipt::gf2::BitMatrix m(n, n);
  std::mt19937_64 rng(6);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m.set(r, c, rng() & 1);
  for (auto _ : state) benchmark::DoNotOptimize(mipt::gf2::rank(m));
}
BENCHMARK(BM_Rank)->RangeMultiplier(2)->Range(64, 1024);

}  // namespace
