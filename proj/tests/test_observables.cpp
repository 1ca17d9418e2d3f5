#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mipt/errors.hpp"
#include "mipt/observables.hpp"
#include "mipt/oracle.hpp"

namespace {

using mipt::Partition;
using mipt::Scheme;
using mipt::Tableau;

TEST(Partition, SchemeSizes) {
  const Partition a = mipt::make_partition(64, Scheme::a);
  EXPECT_EQ(a.A.size, 16u);
  EXPECT_EQ(a.B.size, 16u);
  EXPECT_EQ(a.C.size, 16u);
  EXPECT_EQ(a.D.size, 16u);
  EXPECT_EQ(a.B.begin, 16u);

  const Partition b = mipt::make_partition(64, Scheme::b);
  EXPECT_EQ(b.A.size, 20u);
  EXPECT_EQ(b.B.size, 16u);
  EXPECT_EQ(b.C.size, 20u);
  EXPECT_EQ(b.D.size, 8u);
  EXPECT_EQ(b.C.begin, 36u);
}

TEST(Partition, RejectsIncompatibleSizes) {
  EXPECT_THROW(mipt::make_partition(10, Scheme::b), mipt::ConfigError);
  EXPECT_THROW(mipt::make_partition(10, Scheme::a), mipt::ConfigError);
  EXPECT_NO_THROW(mipt::make_partition(12, Scheme::a));
}

TEST(Qcmi, ProductStateIsZero) {
  const Tableau t = Tableau::zero_state(16);
  EXPECT_EQ(mipt::qcmi(t, mipt::make_partition(16, Scheme::a)), 0);
  EXPECT_EQ(mipt::tmi(t, mipt::make_partition(16, Scheme::b)), 0);
}

TEST(Qcmi, BellPairAcrossB) {
  Tableau t = Tableau::zero_state(4);
  t.h(0);
  t.cnot(0, 2);
  const auto terms = mipt::qcmi_terms(t, mipt::PartitionSubsets(mipt::make_partition(4, Scheme::a)));
  EXPECT_EQ(terms.s_ab, 1);
  EXPECT_EQ(terms.s_bc, 1);
  EXPECT_EQ(terms.s_b, 0);
  EXPECT_EQ(terms.s_abc, 0);
  EXPECT_EQ(terms.value(), 2);
}

TEST(Qcmi, GhzFour) {
  Tableau t = Tableau::zero_state(4);
  t.h(0);
  for (std::size_t q = 1; q < 4; ++q) t.cnot(0, q);
  const Partition part = mipt::make_partition(4, Scheme::a);
  EXPECT_EQ(mipt::qcmi(t, part), 0);
  EXPECT_EQ(mipt::tmi(t, part), -1);
}

TEST(Tmi, MatchesDenseOracle) {
  const auto& group = mipt::CliffordGroup2::instance();
  std::mt19937_64 rng(11);
  const Partition part = mipt::make_partition(8, Scheme::a);
  const mipt::PartitionSubsets sub(part);
  for (int trial = 0; trial < 40; ++trial) {
    Tableau t(8);
    auto s = mipt::oracle::DenseState::zero(8);
    for (int k = 0; k < 40; ++k) {
      const std::size_t i = rng() % 8;
      const std::size_t j = (i + 1 + rng() % 7) % 8;
      const std::size_t idx = group.sample_index(rng);
      t.apply(group.compiled(idx), i, j);
      mipt::oracle::apply_gate_dense(s, group[idx], i, j);
    }
    auto S = [&](const std::vector<std::size_t>& q) { return mipt::oracle::entropy_dense(s, q); };
    const double dense_tmi =
        S(sub.a()) + S(sub.b()) + S(sub.c()) - S(sub.ab()) - S(sub.bc()) - S(sub.ac()) - S(sub.abc());
    const double dense_qcmi = S(sub.ab()) + S(sub.bc()) - S(sub.b()) - S(sub.abc());
    ASSERT_NEAR(mipt::tmi(t, sub), dense_tmi, 1e-8) << trial;
    ASSERT_NEAR(mipt::qcmi(t, sub), dense_qcmi, 1e-8) << trial;
  }
}

TEST(Autocorrelation, WhiteNoiseGivesUnitStride) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::vector<double> x(4000);
  for (auto& v : x) v = n01(rng);
  const auto est = mipt::estimate_autocorrelation_time(x);
  EXPECT_EQ(est.delta_t, 1);
  EXPECT_LT(est.tau, 1.0);
}

TEST(Autocorrelation, RecoversArOneTime) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01;
  const double phi = std::exp(-1.0 / 20.0);
  std::vector<double> x(40000);
  double v = 0.0;
  for (auto& out : x) {
    v = phi * v + n01(rng);
    out = v;
  }
  const auto est = mipt::estimate_autocorrelation_time(x);
  EXPECT_GE(est.tau, 16.0);
  EXPECT_LE(est.tau, 25.0);
  EXPECT_EQ(est.delta_t, static_cast<int>(std::ceil(est.tau)));
  EXPECT_FALSE(est.warning);
}

TEST(Autocorrelation, ConstantSeriesWarns) {
  const std::vector<double> x(100, 3.0);
  const auto est = mipt::estimate_autocorrelation_time(x);
  EXPECT_TRUE(est.warning);
  EXPECT_EQ(est.delta_t, 1);
}

TEST(Autocorrelation, ShortSeriesRejected) {
  const std::vector<double> x(10, 1.0);
  EXPECT_THROW(mipt::estimate_autocorrelation_time(x), std::invalid_argument);
}

TEST(SamplingPlan, CountsTimes) {
  const mipt::SamplingPlan plan{128, 5, 4096};
  EXPECT_EQ(plan.n_samples(), (4096 - 128) / 5 + 1);
  EXPECT_LE(plan.time(plan.n_samples() - 1), 4096);
  EXPECT_GT(plan.time(plan.n_samples() - 1) + 5, 4096);
  EXPECT_EQ(mipt::default_t_min(64), 128);
  EXPECT_EQ(mipt::default_t_min(2048), 2048);
}

TEST(SteadyState, FullMeasurementGivesZero) {
  mipt::CellSpec cell;
  cell.alpha = 4.0;
  cell.p = 1.0;
  cell.allow_unit_p = true;
  cell.L = 32;
  cell.R = 16;
  cell.R_pilot = 8;
  cell.t_max = 200;
  const auto est = mipt::steady_state_qcmi(cell);
  EXPECT_EQ(est.mean, 0.0);
  EXPECT_EQ(est.std_error, 0.0);
  EXPECT_EQ(est.sample_max, 0.0);
}

TEST(SteadyState, UnitPRequiresOptIn) {
  mipt::CellSpec cell;
  cell.p = 1.0;
  EXPECT_THROW(cell.validate(), mipt::ConfigError);
}

TEST(SteadyState, DeterministicAcrossThreadCounts) {
  mipt::CellSpec cell;
  cell.alpha = 3.0;
  cell.p = 0.2;
  cell.L = 16;
  cell.R = 24;
  cell.R_pilot = 16;
  cell.t_max = 256;
  cell.master_seed = 99;
  const auto one = mipt::steady_state_qcmi(cell);
  cell.threads = 3;
  const auto three = mipt::steady_state_qcmi(cell);
  EXPECT_EQ(one.mean, three.mean);
  EXPECT_EQ(one.std_error, three.std_error);
  EXPECT_EQ(one.delta_t, three.delta_t);
  cell.master_seed = 100;
  EXPECT_NE(mipt::steady_state_qcmi(cell).mean, one.mean);
}

TEST(SteadyState, SchemesUseIndependentStreams) {
  mipt::CellSpec cell;
  cell.p = 0.2;
  cell.L = 16;
  cell.R = 8;
  cell.R_pilot = 8;
  cell.t_max = 128;
  cell.delta_t = 4;
  const auto a = mipt::steady_state_qcmi(cell);
  cell.scheme = Scheme::b;
  const auto b = mipt::steady_state_qcmi(cell);
  EXPECT_NE(a.mean, b.mean);
}

TEST(SteadyState, NearCriticalValueAtL64) {
  mipt::CellSpec cell;
  cell.alpha = 4.0;
  cell.p = 0.2036;
  cell.L = 64;
  cell.R = 200;
  const auto est = mipt::steady_state_qcmi(cell);
  EXPECT_NEAR(est.mean, 1.05, 0.2);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_GE(est.sample_min, 0.0);
}

TEST(EntropyProfile, VolumeLawWithoutMeasurements) {
  mipt::CellSpec cell;
  cell.alpha = 4.0;
  cell.p = 0.0;
  cell.L = 64;
  cell.R = 4;
  cell.R_pilot = 8;
  cell.t_max = 300;
  cell.delta_t = 50;
  const auto prof = mipt::entropy_profile(cell);
  ASSERT_EQ(prof.entropies.size(), 3u);
  for (const auto& e : prof.entropies) {
    const double page = static_cast<double>(std::min(e.size, cell.L - e.size));
    EXPECT_GT(e.mean, page - 2.0) << e.subsystem;
    EXPECT_LE(e.mean, page) << e.subsystem;
  }
}

}  // namespace
