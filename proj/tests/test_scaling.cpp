#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mipt/errors.hpp"
#include "mipt/scaling.hpp"

namespace {

using namespace mipt::scaling;
using mipt::AnalysisError;
using mipt::Scheme;

double universal(double x) { return 1.0 + 0.8 * std::tanh(-1.2 * x); }

ScalingDataset synthetic(double p_c, double nu, const std::vector<std::size_t>& sizes, std::size_t n_p, double half,
                         double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DataPoint> pts;
  for (std::size_t L : sizes)
    for (std::size_t k = 0; k < n_p; ++k) {
      const double p = p_c - half + 2.0 * half * static_cast<double>(k) / static_cast<double>(n_p - 1);
      const double mean = universal((p - p_c) * std::pow(static_cast<double>(L), 1.0 / nu));
      const double noise = sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(rng) : 0.0;
      pts.push_back({L, p, mean + noise, sigma > 0.0 ? sigma : 0.01});
    }
  return ScalingDataset(4.0, Scheme::a, pts);
}

TEST(ScalingDataset, RejectsBadInput) {
  EXPECT_THROW(ScalingDataset(1, Scheme::a, {{16, 0.1, 1.0, 0.0}}), AnalysisError);
  EXPECT_THROW(ScalingDataset(1, Scheme::a, {{16, 0.1, 1.0, 0.1}, {16, 0.1, 1.2, 0.1}}), AnalysisError);
  const ScalingDataset ds(1, Scheme::a, {{32, 0.2, 1.0, 0.1}, {16, 0.3, 1.0, 0.1}, {16, 0.1, 1.0, 0.1}});
  EXPECT_EQ(ds.sizes(), (std::vector<std::size_t>{16, 32}));
  EXPECT_DOUBLE_EQ(ds.curve(16).front().p, 0.1);
}

TEST(Collapse, RecoversSyntheticTruth) {
  const auto ds = synthetic(0.25, 1.3, {16, 32, 64, 128}, 11, 0.05, 0.005, 1);
  const auto fit = collapse_fit(ds, 16, 128);
  EXPECT_NEAR(fit.p_c, 0.25, 0.003);
  EXPECT_NEAR(fit.nu, 1.3, 0.05);
  EXPECT_EQ(fit.n_points, 44u);
}

TEST(Collapse, ObjectiveIgnoresInputOrder) {
  const auto ds = synthetic(0.25, 1.3, {16, 32, 64}, 7, 0.05, 0.01, 2);
  auto pts = ds.points();
  std::reverse(pts.begin(), pts.end());
  std::swap(pts[3], pts[10]);
  const ScalingDataset shuffled(4.0, Scheme::a, pts);
  EXPECT_DOUBLE_EQ(collapse_objective(ds, 0.25, 1.3, 1.0, 0.3, 0.05),
                   collapse_objective(shuffled, 0.25, 1.3, 1.0, 0.3, 0.05));
}

TEST(Collapse, TruthScoresBetterThanWrongParameters) {
  const auto ds = synthetic(0.25, 1.3, {16, 32, 64, 128}, 11, 0.05, 0.002, 3);
  const double truth = collapse_objective(ds, 0.25, 1.3, 1.0, 0.3, 0.01);
  EXPECT_LT(truth, collapse_objective(ds, 0.27, 1.3, 1.0, 0.3, 0.01));
  EXPECT_LT(truth, collapse_objective(ds, 0.25, 2.5, 1.0, 0.3, 0.01));
}

TEST(Collapse, Errors) {
  const auto ds = synthetic(0.25, 1.3, {16, 32, 64}, 7, 0.05, 0.01, 4);
  EXPECT_THROW(collapse_fit(ds, 32, 64), AnalysisError);
  EXPECT_THROW(collapse_fit(ds, 16, 16), AnalysisError);
  std::vector<DataPoint> flat;
  for (std::size_t L : {16, 32, 64})
    for (int k = 0; k < 6; ++k) flat.push_back({L, 0.2 + 0.01 * k, 1.0, 0.01});
  EXPECT_THROW(collapse_fit(ScalingDataset(4.0, Scheme::a, flat), 16, 64), AnalysisError);
  const auto sparse = synthetic(0.25, 1.3, {16, 32, 64}, 4, 0.05, 0.01, 5);
  EXPECT_THROW(collapse_fit(sparse, 16, 64), AnalysisError);
}

TEST(Collapse, CollapsedCoordinates) {
  const auto ds = synthetic(0.25, 1.3, {16, 32}, 5, 0.05, 0.01, 6);
  const auto pts = collapsed_coordinates(ds, 0.25, 1.3);
  ASSERT_EQ(pts.size(), 10u);
  EXPECT_NEAR(pts[0].x, -0.05 * std::pow(16.0, 1.0 / 1.3), 1e-12);
  EXPECT_NEAR(pts[2].x, 0.0, 1e-12);
}

TEST(Bootstrap, ShrinksWithErrorsAndGrowsWhenDoubled) {
  const auto base = synthetic(0.25, 1.3, {16, 32, 64}, 7, 0.03, 0.0, 7);
  auto with_sigma = [&](double s) {
    auto pts = base.points();
    for (auto& pt : pts) pt.I_stderr = s;
    return ScalingDataset(4.0, Scheme::a, pts);
  };
  BootstrapOptions opts;
  opts.resamples = 100;
  opts.restarts = 1;
  double prev = -1.0;
  for (double s : {1e-7, 0.01, 0.02}) {
    const auto ds = with_sigma(s);
    const auto fit = collapse_fit(ds, 16, 64);
    const auto boot = bootstrap_collapse(ds, 16, 64, fit, opts);
    EXPECT_FALSE(boot.flagged);
    if (s < 1e-6) {
      EXPECT_LT(boot.p_c_sigma, 1e-4);
      EXPECT_LT(boot.nu_sigma, 1e-3);
    } else {
      EXPECT_GT(boot.p_c_sigma, prev);
    }
    prev = boot.p_c_sigma;
  }
}

TEST(Bootstrap, RejectsTooFewResamples) {
  const auto ds = synthetic(0.25, 1.3, {16, 32, 64}, 7, 0.03, 0.01, 8);
  BootstrapOptions opts;
  opts.resamples = 50;
  EXPECT_THROW(bootstrap_collapse(ds, 16, 64, collapse_fit(ds, 16, 64), opts), std::invalid_argument);
}

// Over independent synthetic datasets, the bootstrap 1-sigma interval around
// the fitted p_c should contain the truth about 68% of the time.
TEST(Bootstrap, CoverageOnSyntheticTruth) {
  const int datasets = 60;
  int covered_pc = 0, covered_nu = 0;
  BootstrapOptions opts;
  opts.resamples = 100;
  opts.restarts = 1;
  CollapseOptions copts;
  copts.restarts = 4;
  for (int d = 0; d < datasets; ++d) {
    const auto ds = synthetic(0.25, 1.3, {16, 32, 64}, 7, 0.04, 0.02, 1000 + static_cast<std::uint64_t>(d));
    const auto fit = collapse_fit(ds, 16, 64, copts);
    opts.seed = static_cast<std::uint64_t>(d);
    const auto boot = bootstrap_collapse(ds, 16, 64, fit, opts);
    covered_pc += std::abs(fit.p_c - 0.25) <= boot.p_c_sigma;
    covered_nu += std::abs(fit.nu - 1.3) <= boot.nu_sigma;
  }
  EXPECT_NEAR(covered_pc / double(datasets), 0.68, 0.10);
  EXPECT_NEAR(covered_nu / double(datasets), 0.68, 0.10);
}

CollapseFit fit_at(std::size_t L_min, double p_c, double nu, double err) {
  CollapseFit f;
  f.L_min = L_min;
  f.p_c = p_c;
  f.nu = nu;
  f.p_c_err = err;
  f.nu_err = err;
  return f;
}

TEST(LminExtrapolation, ConstantAndLinear) {
  std::vector<CollapseFit> flat, linear;
  for (std::size_t L : {8, 16, 32, 64, 128}) {
    flat.push_back(fit_at(L, 0.2036, 1.255, 0.001));
    linear.push_back(fit_at(L, 0.25 + 0.3 / static_cast<double>(L), 1.3 - 2.0 / static_cast<double>(L), 0.001));
  }
  const auto a = lmin_extrapolate(flat);
  EXPECT_NEAR(a.p_c, 0.2036, 1e-12);
  EXPECT_NEAR(a.nu, 1.255, 1e-12);
  EXPECT_EQ(a.L_mins_used, (std::vector<std::size_t>{16, 32, 64, 128}));
  const auto b = lmin_extrapolate(linear);
  EXPECT_NEAR(b.p_c, 0.25, std::max(1e-10, b.p_c_err));
  EXPECT_NEAR(b.nu, 1.3, 1e-10);
  EXPECT_GT(b.p_c_err, 0.0);
  linear.pop_back();
  linear.pop_back();
  EXPECT_THROW(lmin_extrapolate(linear), AnalysisError);
}

ScalingDataset two_lines(double slope_a, double slope_b) {
  std::vector<DataPoint> pts;
  for (int k = 0; k < 9; ++k) {
    const double p = 0.26 + 0.01 * k;
    pts.push_back({32, p, 1.1 + slope_a * (p - 0.3), 0.01});
    pts.push_back({64, p, 1.1 + slope_b * (p - 0.3), 0.01});
  }
  return ScalingDataset(4.0, Scheme::a, pts);
}

TEST(Crossing, ExactLinearIntersection) {
  const auto c = find_crossing(two_lines(-4.0, -9.0), 32);
  EXPECT_NEAR(c.p_cross, 0.3, 1e-6);
  EXPECT_NEAR(c.I_cross, 1.1, 1e-6);
  EXPECT_FALSE(c.multiple_roots);
}

TEST(Crossing, ParallelCurvesDoNotCross) {
  std::vector<DataPoint> pts;
  for (int k = 0; k < 9; ++k) {
    const double p = 0.26 + 0.01 * k;
    pts.push_back({32, p, 1.0 - p, 0.01});
    pts.push_back({64, p, 1.2 - p, 0.01});
  }
  EXPECT_THROW(find_crossing(ScalingDataset(4.0, Scheme::a, pts), 32), AnalysisError);
  EXPECT_THROW(find_crossing(two_lines(-4.0, -9.0), 64), AnalysisError);
}

TEST(Crossing, SyntheticCollapseCrossesAtCriticalPoint) {
  const auto ds = synthetic(0.25, 1.3, {32, 64}, 11, 0.05, 0.0, 9);
  auto pts = ds.points();
  for (auto& pt : pts) pt.I_stderr = 0.01;
  CrossingOptions opts;
  opts.bootstrap = 100;
  const auto c = find_crossing(ScalingDataset(4.0, Scheme::a, pts), 32, opts);
  EXPECT_NEAR(c.p_cross, 0.25, 1e-3);
  EXPECT_NEAR(c.I_cross, 1.0, 1e-2);
  EXPECT_GT(c.p_cross_err, 0.0);
  EXPECT_LT(c.p_cross_err, 0.01);
}

TEST(Crossing, MultipleRootsPickNearestToReference) {
  std::vector<DataPoint> pts;
  for (int k = 0; k < 21; ++k) {
    const double p = 0.1 + 0.01 * k;
    pts.push_back({16, p, std::sin(40.0 * p), 0.01});
    pts.push_back({32, p, 0.0, 0.01});
  }
  CrossingOptions opts;
  opts.window = 5;
  opts.p_reference = 0.24;
  const auto c = find_crossing(ScalingDataset(1.0, Scheme::a, pts), 16, opts);
  EXPECT_TRUE(c.multiple_roots);
  EXPECT_NEAR(c.p_cross, 3.0 * std::numbers::pi / 40.0, 2e-3);
}

std::vector<CrossingPoint> synthetic_crossings(double p_c, double nu, double w, double a1, double a2) {
  std::vector<CrossingPoint> pts;
  for (std::size_t L : {8, 16, 32, 64, 128, 256}) {
    CrossingPoint c;
    c.L = L;
    const double l = static_cast<double>(L);
    c.p_cross = p_c + a1 * std::pow(l, -1.0 / nu - w) + a2 * std::pow(l, -1.0 / nu - 2.0 * w);
    c.p_cross_err = 1e-5;
    pts.push_back(c);
  }
  return pts;
}

TEST(CrossingPFit, RecoversOmega) {
  const auto fit = fit_crossing_p(synthetic_crossings(0.2, 1.3, 0.9, 0.5, -0.3), 0.2, 1.3);
  EXPECT_NEAR(fit.omega1, 0.9, 0.1);
  EXPECT_DOUBLE_EQ(fit.omega2, 2.0 * fit.omega1);
  EXPECT_NEAR(fit.a1, 0.5, 0.05);
  EXPECT_NEAR(fit.a2, -0.3, 0.05);
  EXPECT_LT(fit.residual_norm, 1e-8);
  EXPECT_FALSE(fit.flagged);
  EXPECT_LE(fit.omega1_lo, fit.omega1);
  EXPECT_GE(fit.omega1_hi, fit.omega1);
}

TEST(CrossingPFit, NestedSingleCorrection) {
  const auto pts = synthetic_crossings(0.2, 1.3, 0.9, 0.5, 0.0);
  const auto full = fit_crossing_p(pts, 0.2, 1.3);
  EXPECT_NEAR(full.a2, 0.0, 1e-3);
  EXPECT_NEAR(full.omega1, 0.9, 0.05);
  CrossingPOptions opts;
  opts.a2_zero = true;
  const auto single = fit_crossing_p(pts, 0.2, 1.3, opts);
  EXPECT_EQ(single.a2, 0.0);
  EXPECT_NEAR(single.omega1, 0.9, 1e-4);
  EXPECT_NEAR(single.a1, 0.5, 1e-4);
}

TEST(CrossingPFit, IndependentOmega2IsFlagged) {
  CrossingPOptions opts;
  opts.independent_omega2 = true;
  opts.grid = 60;
  const auto fit = fit_crossing_p(synthetic_crossings(0.2, 1.3, 0.9, 0.5, -0.3), 0.2, 1.3, opts);
  EXPECT_TRUE(fit.flagged);
  EXPECT_GT(fit.omega2, fit.omega1);
}

TEST(CrossingPFit, NeedsFourPoints) {
  auto pts = synthetic_crossings(0.2, 1.3, 0.9, 0.5, -0.3);
  pts.resize(3);
  EXPECT_THROW(fit_crossing_p(pts, 0.2, 1.3), AnalysisError);
}

TEST(CrossingIFit, RecoversInterceptForBothSchemes) {
  for (Scheme s : {Scheme::a, Scheme::b}) {
    std::vector<CrossingPoint> pts;
    std::mt19937_64 rng(10);
    for (std::size_t L : {16, 32, 64, 128, 256}) {
      CrossingPoint c;
      c.L = L;
      const double l = static_cast<double>(L);
      const double value = 1.05 + 0.8 * std::pow(l, -0.9) - 0.4 * std::pow(l, -1.8);
      c.I_cross = geometric_factor(s) * (value + std::normal_distribution<double>(0.0, 0.002)(rng));
      c.I_cross_err = 0.002 * geometric_factor(s);
      pts.push_back(c);
    }
    const auto fit = fit_crossing_I(pts, 0.9, s);
    EXPECT_NEAR(fit.c_over_3, 1.05, 0.02);
    EXPECT_GT(fit.c_over_3_err, 0.0);
    pts.resize(2);
    EXPECT_THROW(fit_crossing_I(pts, 0.9, s), AnalysisError);
  }
}

TEST(Geometry, ChordLength) {
  EXPECT_NEAR(chord_length(64, 32), 64.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(chord_length(16, 4), 3.6013, 1e-4);
  for (std::size_t s = 1; s < 40; ++s) EXPECT_EQ(chord_length(40, s), chord_length(40, 40 - s));
  EXPECT_THROW(chord_length(16, 0), std::invalid_argument);
  EXPECT_THROW(chord_length(16, 16), std::invalid_argument);
}

TEST(Geometry, PartitionFactors) {
  EXPECT_EQ(geometric_factor(Scheme::a), 1.0);
  const double b = std::log2(std::pow(std::sin(9 * std::numbers::pi / 16), 2) /
                             (std::sin(std::numbers::pi / 4) * std::sin(std::numbers::pi / 8)));
  EXPECT_NEAR(geometric_factor(Scheme::b), b, 1e-12);
  EXPECT_NEAR(geometric_factor(Scheme::b), 1.830, 1e-3);
}

TEST(EntropyFit, ExactLogLaw) {
  std::vector<EntropySample> s;
  for (double l : {3.0, 7.5, 20.0, 81.0}) s.push_back({l, 1.05 * std::log2(l) + 0.4, 0.01});
  const auto fit = fit_entropy_log(s);
  EXPECT_NEAR(fit.c_over_3, 1.05, 1e-12);
  EXPECT_NEAR(fit.c_prime, 0.4, 1e-12);
  EXPECT_NEAR(fit.chi2, 0.0, 1e-18);
}

TEST(EntropyFit, NeedsThreeDistinctChords) {
  std::vector<EntropySample> s{{4.0, 2.0, 0.1}, {4.0, 2.1, 0.1}, {8.0, 3.0, 0.1}, {8.0, 3.1, 0.1}};
  EXPECT_THROW(fit_entropy_log(s), AnalysisError);
}

TEST(EntropyFit, EffectiveCentralChargeConversion) {
  EXPECT_NEAR(c_tilde(1.053), 1.519, 5e-4);
  EXPECT_NEAR(c_tilde(std::numbers::ln2), 1.0, 1e-15);
}

}  // namespace
