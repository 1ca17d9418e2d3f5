#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mipt/observables.hpp"

namespace mipt::scaling {

struct DataPoint {
  std::size_t L = 0;
  double p = 0.0;
  double I_mean = 0.0;
  double I_stderr = 0.0;
};

/// I(p, L) curves of one (alpha, scheme) group. Per size, p is strictly
/// increasing; every stderr is positive and finite.
class ScalingDataset {
 public:
  ScalingDataset() = default;
  ScalingDataset(double alpha, Scheme scheme, std::vector<DataPoint> points);

  double alpha() const { return alpha_; }
  Scheme scheme() const { return scheme_; }
  const std::vector<DataPoint>& points() const { return points_; }
  std::vector<std::size_t> sizes() const;
  std::vector<DataPoint> curve(std::size_t L) const;
  bool has_size(std::size_t L) const;
  /// Points with L_min <= L <= L_max.
  ScalingDataset restricted(std::size_t L_min, std::size_t L_max) const;
  /// Same grid with I_mean replaced.
  ScalingDataset with_means(const std::vector<double>& means) const;

 private:
  double alpha_ = 0.0;
  Scheme scheme_ = Scheme::a;
  std::vector<DataPoint> points_;  // sorted by (L, p)
};

/// Splits result rows into (alpha, scheme) groups, in ascending order.
std::vector<ScalingDataset> group_results(const std::vector<SteadyStateEstimate>& rows);

struct CollapseOptions {
  std::size_t restarts = 8;
  double noise_floor_init = 0.05;
};

struct CollapseFit {
  double p_c = 0.0;
  double nu = 0.0;
  double amplitude = 0.0;    // kernel scale, standardized units
  double length = 0.0;       // kernel length on the normalized x axis
  double noise_floor = 0.0;  // standardized units
  double log_marginal_likelihood = 0.0;
  std::size_t L_min = 0;
  std::size_t L_max = 0;
  std::size_t n_points = 0;
  bool converged = false;
  // Filled by bootstrap_collapse.
  double p_c_err = 0.0;
  double nu_err = 0.0;
  bool bootstrap_flagged = false;
};

/// Gaussian-process data collapse of I against (p - p_c) L^{1/nu}.
/// AnalysisError on fewer than 3 sizes, fewer than 5 points per size, or
/// constant data.
CollapseFit collapse_fit(const ScalingDataset& ds, std::size_t L_min, std::size_t L_max,
                         const CollapseOptions& opts = {});

/// Negative log marginal likelihood at fixed (p_c, nu) and hyperparameters;
/// exposed for tests of the objective.
double collapse_objective(const ScalingDataset& ds, double p_c, double nu, double amplitude, double length,
                          double noise_floor);

/// Rescaled coordinates (x, y, L) at the fitted (p_c, nu).
struct CollapsedPoint {
  double x = 0.0;
  double y = 0.0;
  double y_err = 0.0;
  std::size_t L = 0;
};
std::vector<CollapsedPoint> collapsed_coordinates(const ScalingDataset& ds, double p_c, double nu);

struct BootstrapOptions {
  std::size_t resamples = 200;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t restarts = 2;  // per refit; the first start is the central fit
};

struct BootstrapResult {
  double p_c_sigma = 0.0;
  double nu_sigma = 0.0;
  std::size_t failed = 0;
  bool flagged = false;  // more than 10% of refits failed
  std::vector<double> p_c_samples;
  std::vector<double> nu_samples;
};

/// Parametric bootstrap: every mean is redrawn from Normal(mean, stderr) and
/// the collapse refitted. Requires resamples >= 100.
BootstrapResult bootstrap_collapse(const ScalingDataset& ds, std::size_t L_min, std::size_t L_max,
                                   const CollapseFit& central, const BootstrapOptions& opts = {});

struct Extrapolation {
  double p_c = 0.0;
  double p_c_err = 0.0;
  double nu = 0.0;
  double nu_err = 0.0;
  std::vector<std::size_t> L_mins_used;
};

/// Weighted linear fit of p_c and nu against 1/L_min over the four largest
/// L_min; the intercept is the extrapolated value.
Extrapolation lmin_extrapolate(const std::vector<CollapseFit>& fits);

struct CrossingOptions {
  std::size_t window = 7;
  std::optional<double> p_reference;  // picks among several sign changes
  std::size_t bootstrap = 0;
  std::uint64_t seed = 1;
};

struct CrossingPoint {
  std::size_t L = 0;
  double p_cross = 0.0;
  double I_cross = 0.0;
  double p_cross_err = 0.0;
  double I_cross_err = 0.0;
  bool multiple_roots = false;
  std::size_t bootstrap_failed = 0;
};

/// Intersection of the cubic least-squares fits of I(p, L) and I(p, 2L) in a
/// window around the sign change of their difference.
CrossingPoint find_crossing(const ScalingDataset& ds, std::size_t L, const CrossingOptions& opts = {});

/// Every L with 2L present and a sign change; sizes without one are listed in `gaps`.
std::vector<CrossingPoint> find_crossings(const ScalingDataset& ds, const CrossingOptions& opts,
                                          std::vector<std::string>* gaps = nullptr);

struct CorrectionFit {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double a1 = 0.0, a2 = 0.0;  // crossing p fit
  double c_over_3 = 0.0, b1 = 0.0, b2 = 0.0;  // crossing I fit
  double c_over_3_err = 0.0;
  double chi2 = 0.0;
  double residual_norm = 0.0;
  bool flagged = false;  // omega1 not identified by the data
  double omega1_lo = 0.0;  // chi2 <= min + 1 interval
  double omega1_hi = 0.0;
};

struct CrossingPOptions {
  bool a2_zero = false;
  bool independent_omega2 = false;
  double omega_min = 0.02;
  double omega_max = 5.0;
  std::size_t grid = 250;
};

/// p^x(L) = p_c + a1 L^{-1/nu-omega1} + a2 L^{-1/nu-omega2}, omega2 = 2 omega1
/// unless independent_omega2. Needs at least 4 crossing points.
CorrectionFit fit_crossing_p(const std::vector<CrossingPoint>& points, double p_c, double nu,
                             const CrossingPOptions& opts = {});

/// I^x(L) = c/3 + b1 L^{-omega1} + b2 L^{-2 omega1}, scheme-b values divided by
/// geometric_factor(b) first. Needs at least 3 points.
CorrectionFit fit_crossing_I(const std::vector<CrossingPoint>& points, double omega1, Scheme scheme);

/// (L / pi) sin(pi size / L); std::invalid_argument unless 0 < size < L.
double chord_length(std::size_t L, std::size_t size);

/// log2(l_AB l_BC / (l_B l_ABC)) of a partition shape, i.e. the coefficient
/// multiplying c/3 in the critical QCMI. 1 for scheme a.
double geometric_factor(Scheme scheme);

struct EntropySample {
  double chord_length = 0.0;
  double S_mean = 0.0;
  double S_stderr = 0.0;
};

struct EntropyLogFit {
  double c_over_3 = 0.0;
  double c_prime = 0.0;
  double c_over_3_err = 0.0;
  double c_prime_err = 0.0;
  double chi2 = 0.0;
};

/// Weighted fit S = (c/3) log2(l) + c'. Needs 3 distinct chord lengths.
EntropyLogFit fit_entropy_log(const std::vector<EntropySample>& samples);

/// c~ = (c/3) / ln 2.
double c_tilde(double c_over_3);

}  // namespace mipt::scaling
