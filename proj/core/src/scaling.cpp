#include "mipt/scaling.hpp"

#include <algorithm>
#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mipt/errors.hpp"
#include "mipt/numerics.hpp"
#include "mipt/parallel.hpp"
#include "mipt/rng.hpp"

namespace mipt::scaling {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_p(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

ScalingDataset::ScalingDataset(double alpha, Scheme scheme, std::vector<DataPoint> points)
    : alpha_(alpha), scheme_(scheme), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end(),
            [](const DataPoint& a, const DataPoint& b) { return a.L != b.L ? a.L < b.L : a.p < b.p; });
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const auto& pt = points_[k];
    if (!(pt.I_stderr > 0.0) || !std::isfinite(pt.I_stderr) || !std::isfinite(pt.I_mean))
      throw AnalysisError("scaling dataset: stderr must be positive and finite (L=" + std::to_string(pt.L) +
                          ", p=" + std::to_string(pt.p) + ")");
    if (k > 0 && points_[k - 1].L == pt.L && !(points_[k - 1].p < pt.p) )
      throw AnalysisError("scaling dataset: repeated p value at L=" + std::to_string(pt.L));
  }
}

std::vector<std::size_t> ScalingDataset::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& pt : points_)
    if (out.empty() || out.back() != pt.L) out.push_back(pt.L);
  return out;
}

std::vector<DataPoint> ScalingDataset::curve(std::size_t L) const {
  std::vector<DataPoint> out;
  for (const auto& pt : points_)
    if (pt.L == L) out.push_back(pt);
  return out;
}

bool ScalingDataset::has_size(std::size_t L) const {
  return std::any_of(points_.begin(), points_.end(), [L](const DataPoint& pt) { return pt.L == L; });
}

ScalingDataset ScalingDataset::restricted(std::size_t L_min, std::size_t L_max) const {
  std::vector<DataPoint> kept;
  for (const auto& pt : points_)
    if (pt.L >= L_min && pt.L <= L_max) kept.push_back(pt);
  return ScalingDataset(alpha_, scheme_, std::move(kept));
}

ScalingDataset ScalingDataset::with_means(const std::vector<double>& means) const {
  if (means.size() != points_.size()) throw std::invalid_argument("with_means: size mismatch");
  ScalingDataset out = *this;
  for (std::size_t k = 0; k < means.size(); ++k) out.points_[k].I_mean = means[k];
  return out;
}

std::vector<ScalingDataset> group_results(const std::vector<SteadyStateEstimate>& rows) {
  std::map<std::pair<double, char>, std::vector<DataPoint>> groups;
  for (const auto& r : rows)
    groups[{r.alpha, scheme_char(r.scheme)}].push_back({r.L, r.p, r.mean, r.std_error});
  std::vector<ScalingDataset> out;
  for (auto& [key, pts] : groups) out.emplace_back(key.first, parse_scheme(std::string(1, key.second)), std::move(pts));
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian-process collapse

namespace {

struct CollapseProblem {
  std::vector<double> p, logL, y, noise;  // y standardized, noise = (stderr / s_y)^2
  double p_lo = 0.0, p_hi = 0.0;
  double y_mean = 0.0, y_scale = 1.0;
};

CollapseProblem make_problem(const ScalingDataset& ds) {
  CollapseProblem pr;
  const auto& pts = ds.points();
  const std::size_t n = pts.size();
  double sum = 0.0;
  for (const auto& pt : pts) sum += pt.I_mean;
  pr.y_mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& pt : pts) ss += (pt.I_mean - pr.y_mean) * (pt.I_mean - pr.y_mean);
  pr.y_scale = std::sqrt(ss / static_cast<double>(n));
  if (!(pr.y_scale > 1e-12 * std::max(1.0, std::abs(pr.y_mean))))
    throw AnalysisError("collapse: all I values are equal");
  pr.p_lo = kInf;
  pr.p_hi = -kInf;
  for (const auto& pt : pts) {
    pr.p.push_back(pt.p);
    pr.logL.push_back(std::log(static_cast<double>(pt.L)));
    pr.y.push_back((pt.I_mean - pr.y_mean) / pr.y_scale);
    pr.noise.push_back((pt.I_stderr / pr.y_scale) * (pt.I_stderr / pr.y_scale));
    pr.p_lo = std::min(pr.p_lo, pt.p);
    pr.p_hi = std::max(pr.p_hi, pt.p);
  }
  return pr;
}

double negative_log_likelihood(const CollapseProblem& pr, double p_c, double nu, double amp, double len,
                               double noise_floor) {
  const std::size_t n = pr.p.size();
  std::vector<double> u(n);
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (pr.p[i] - p_c) * std::exp(pr.logL[i] / nu);
    lo = std::min(lo, u[i]);
    hi = std::max(hi, u[i]);
  }
  if (!(hi > lo)) return kInf;
  for (auto& v : u) v = 2.0 * (v - lo) / (hi - lo) - 1.0;

  Eigen::MatrixXd K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double a2 = amp * amp;
  const double inv = 1.0 / (2.0 * len * len);
  const double floor2 = noise_floor * noise_floor;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    K(ii, ii) = a2 + pr.noise[i] + floor2;
    for (std::size_t j = 0; j < i; ++j) {
      const double d = u[i] - u[j];
      const double k = a2 * std::exp(-d * d * inv);
      K(ii, static_cast<Eigen::Index>(j)) = k;
      K(static_cast<Eigen::Index>(j), ii) = k;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return kInf;
  const Eigen::Map<const Eigen::VectorXd> y(pr.y.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd alpha = llt.solve(y);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < K.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
  return 0.5 * y.dot(alpha) + logdet + 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

// Optimizer coordinates: (p_c, log nu, log amp, log len, log noise_floor).
struct Bounds {
  double p_lo, p_hi;
  static constexpr double log_nu_lo = -1.2, log_nu_hi = 1.7;       // nu in [0.30, 5.5]
  static constexpr double log_amp_lo = -5.0, log_amp_hi = 4.0;
  static constexpr double log_len_lo = -5.0, log_len_hi = 3.0;
  static constexpr double log_noise_lo = -14.0, log_noise_hi = 2.0;

  bool inside(const std::vector<double>& v) const {
    return v[0] > p_lo && v[0] < p_hi && v[1] > log_nu_lo && v[1] < log_nu_hi && v[2] > log_amp_lo &&
           v[2] < log_amp_hi && v[3] > log_len_lo && v[3] < log_len_hi && v[4] > log_noise_lo && v[4] < log_noise_hi;
  }
};

struct Candidate {
  std::vector<double> v;
  double value = kInf;
  bool converged = false;
};

Candidate optimize_from(const CollapseProblem& pr, const Bounds& b, std::vector<double> start) {
  const auto objective = [&](const std::vector<double>& v) {
    if (!b.inside(v)) return 1e300;
    return negative_log_likelihood(pr, v[0], std::exp(v[1]), std::exp(v[2]), std::exp(v[3]), std::exp(v[4]));
  };
  numerics::SimplexOptions opts;
  const double dp = 0.1 * (b.p_hi - b.p_lo);
  opts.steps = {dp, 0.2, 0.3, 0.3, 0.5};
  opts.size_tolerance = 1e-8;
  opts.max_iterations = 6000;
  Candidate best;
  // Two passes: a restarted simplex escapes premature collapse of the first.
  for (int pass = 0; pass < 2; ++pass) {
    const auto res = numerics::minimize_simplex(objective, start, opts);
    if (res.value < best.value) best = {res.x, res.value, res.converged};
    start = res.x;
    for (auto& s : opts.steps) s *= 0.3;
  }
  return best;
}

CollapseFit to_fit(const Candidate& c, std::size_t L_min, std::size_t L_max, std::size_t n) {
  CollapseFit fit;
  fit.p_c = c.v[0];
  fit.nu = std::exp(c.v[1]);
  fit.amplitude = std::exp(c.v[2]);
  fit.length = std::exp(c.v[3]);
  fit.noise_floor = std::exp(c.v[4]);
  fit.log_marginal_likelihood = -c.value;
  fit.L_min = L_min;
  fit.L_max = L_max;
  fit.n_points = n;
  fit.converged = c.converged;
  return fit;
}

ScalingDataset checked_window(const ScalingDataset& ds, std::size_t L_min, std::size_t L_max) {
  const auto sub = ds.restricted(L_min, L_max);
  const auto sizes = sub.sizes();
  if (sizes.size() < 3)
    throw AnalysisError("collapse: need at least 3 system sizes in [" + std::to_string(L_min) + ", " +
                        std::to_string(L_max) + "], found " + std::to_string(sizes.size()));
  for (std::size_t L : sizes)
    if (sub.curve(L).size() < 5) throw AnalysisError("collapse: fewer than 5 p points at L=" + std::to_string(L));
  return sub;
}

}  // namespace

double collapse_objective(const ScalingDataset& ds, double p_c, double nu, double amplitude, double length,
                          double noise_floor) {
  return negative_log_likelihood(make_problem(ds), p_c, nu, amplitude, length, noise_floor);
}

CollapseFit collapse_fit(const ScalingDataset& ds, std::size_t L_min, std::size_t L_max, const CollapseOptions& opts) {
  const auto sub = checked_window(ds, L_min, L_max);
  const auto pr = make_problem(sub);
  const double margin = 0.5 * (pr.p_hi - pr.p_lo);
  const Bounds b{pr.p_lo - margin, pr.p_hi + margin};

  const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);
  const std::size_t n_p = (restarts + 1) / 2;
  Candidate best;
  for (std::size_t r = 0; r < restarts; ++r) {
    const double frac = (static_cast<double>(r % n_p) + 0.5) / static_cast<double>(n_p);
    const double nu0 = (r / n_p) % 2 == 0 ? 1.0 : 1.6;
    const std::vector<double> start{pr.p_lo + frac * (pr.p_hi - pr.p_lo), std::log(nu0), 0.0, std::log(0.5),
                                    std::log(opts.noise_floor_init)};
    const auto c = optimize_from(pr, b, start);
    if (c.value < best.value) best = c;
  }
  if (!std::isfinite(best.value)) throw AnalysisError("collapse: objective not finite at any start");
  return to_fit(best, L_min, L_max, sub.points().size());
}

std::vector<CollapsedPoint> collapsed_coordinates(const ScalingDataset& ds, double p_c, double nu) {
  std::vector<CollapsedPoint> out;
  for (const auto& pt : ds.points())
    out.push_back({(pt.p - p_c) * std::pow(static_cast<double>(pt.L), 1.0 / nu), pt.I_mean, pt.I_stderr, pt.L});
  return out;
}

BootstrapResult bootstrap_collapse(const ScalingDataset& ds, std::size_t L_min, std::size_t L_max,
                                   const CollapseFit& central, const BootstrapOptions& opts) {
  if (opts.resamples < 100) throw std::invalid_argument("bootstrap_collapse: need at least 100 resamples");
  const auto sub = checked_window(ds, L_min, L_max);
  const auto& pts = sub.points();
  double p_min = kInf, p_max = -kInf;
  for (const auto& pt : pts) {
    p_min = std::min(p_min, pt.p);
    p_max = std::max(p_max, pt.p);
  }
  const double margin = 0.5 * (p_max - p_min);
  const Bounds b{p_min - margin, p_max + margin};
  const std::vector<double> centre{central.p_c, std::log(central.nu), std::log(central.amplitude),
                                   std::log(central.length), std::log(std::max(central.noise_floor, 1e-6))};

  struct Outcome {
    bool ok = false;
    double p_c = 0.0, nu = 0.0;
  };
  std::vector<Outcome> outcomes(opts.resamples);
  parallel_for(opts.resamples, std::max<std::size_t>(1, opts.threads), [&](std::size_t k) {
    Rng rng(hash_words({opts.seed, static_cast<std::uint64_t>(StreamKind::bootstrap), k}));
    std::vector<double> means(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      means[i] = std::normal_distribution<double>(pts[i].I_mean, pts[i].I_stderr)(rng);
    try {
      const auto pr = make_problem(sub.with_means(means));
      Candidate best;
      for (std::size_t r = 0; r < std::max<std::size_t>(1, opts.restarts); ++r) {
        auto start = centre;
        if (r > 0) {
          start[0] = p_min + (static_cast<double>(r) - 0.5) / static_cast<double>(opts.restarts) * (p_max - p_min);
          start[1] = std::log(r % 2 ? 1.6 : 1.0);
        }
        const auto c = optimize_from(pr, b, start);
        if (c.value < best.value) best = c;
      }
      if (std::isfinite(best.value)) {
        const double pc = best.v[0];
        const bool at_edge = pc <= b.p_lo + 1e-6 * margin || pc >= b.p_hi - 1e-6 * margin;
        outcomes[k] = {!at_edge, pc, std::exp(best.v[1])};
      }
    } catch (const AnalysisError&) {
    }
  });

  BootstrapResult res;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++res.failed;
      continue;
    }
    res.p_c_samples.push_back(o.p_c);
    res.nu_samples.push_back(o.nu);
  }
  res.p_c_sigma = numerics::sample_stddev(res.p_c_samples);
  res.nu_sigma = numerics::sample_stddev(res.nu_samples);
  res.flagged = static_cast<double>(res.failed) > 0.1 * static_cast<double>(opts.resamples);
  return res;
}

Extrapolation lmin_extrapolate(const std::vector<CollapseFit>& fits) {
  if (fits.size() < 4) throw AnalysisError("L_min extrapolation: need at least 4 L_min values");
  auto sorted = fits;
  std::sort(sorted.begin(), sorted.end(), [](const CollapseFit& a, const CollapseFit& b) { return a.L_min < b.L_min; });
  const std::vector<CollapseFit> last(sorted.end() - 4, sorted.end());
  Eigen::MatrixXd X(4, 2);
  Eigen::VectorXd yp(4), yn(4);
  std::vector<double> sp, sn;
  Extrapolation out;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const auto& f = last[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = 1.0 / static_cast<double>(f.L_min);
    yp[i] = f.p_c;
    yn[i] = f.nu;
    sp.push_back(f.p_c_err);
    sn.push_back(f.nu_err);
    out.L_mins_used.push_back(f.L_min);
  }
  const auto fp = numerics::fit_parameters(X, yp, sp);
  const auto fn = numerics::fit_parameters(X, yn, sn);
  out.p_c = fp.coef[0];
  out.p_c_err = fp.err[0];
  out.nu = fn.coef[0];
  out.nu_err = fn.err[0];
  return out;
}

// ---------------------------------------------------------------------------
// Crossing points

namespace {

struct Poly {
  Eigen::VectorXd c;  // in t = (p - centre) / scale
  double centre = 0.0, scale = 1.0;
  double operator()(double p) const {
    const double t = (p - centre) / scale;
    double v = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) v = v * t + c[k];
    return v;
  }
};

Poly fit_poly(const std::vector<double>& p, const std::vector<double>& y, const std::vector<double>& err,
              double centre, double scale) {
  const auto n = static_cast<Eigen::Index>(p.size());
  const Eigen::Index degree = std::min<Eigen::Index>(3, n - 1);
  Eigen::MatrixXd X(n, degree + 1);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (p[static_cast<std::size_t>(i)] - centre) / scale;
    double v = 1.0;
    for (Eigen::Index k = 0; k <= degree; ++k) {
      X(i, k) = v;
      v *= t;
    }
    Y[i] = y[static_cast<std::size_t>(i)];
  }
  Poly poly;
  poly.c = numerics::weighted_least_squares(X, Y, numerics::inverse_variance_weights(err)).coef;
  poly.centre = centre;
  poly.scale = scale;
  return poly;
}

struct PairedCurves {
  std::vector<double> p, a, a_err, b, b_err;  // a: size L, b: size 2L
};

PairedCurves pair_curves(const ScalingDataset& ds, std::size_t L) {
  if (!ds.has_size(L) || !ds.has_size(2 * L))
    throw AnalysisError("crossing: sizes " + std::to_string(L) + " and " + std::to_string(2 * L) + " not both present");
  const auto ca = ds.curve(L);
  const auto cb = ds.curve(2 * L);
  PairedCurves pc;
  for (const auto& x : ca)
    for (const auto& y : cb)
      if (same_p(x.p, y.p)) {
        pc.p.push_back(x.p);
        pc.a.push_back(x.I_mean);
        pc.a_err.push_back(x.I_stderr);
        pc.b.push_back(y.I_mean);
        pc.b_err.push_back(y.I_stderr);
      }
  if (pc.p.size() < 2) throw AnalysisError("crossing: fewer than 2 common p values at L=" + std::to_string(L));
  return pc;
}

struct RootResult {
  double p = 0.0, I = 0.0;
  bool multiple = false;
};

RootResult crossing_of(const PairedCurves& pc, const CrossingOptions& opts) {
  const std::size_t n = pc.p.size();
  std::vector<std::size_t> changes;  // sign change between k and k + 1
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d0 = pc.a[k] - pc.b[k];
    const double d1 = pc.a[k + 1] - pc.b[k + 1];
    if (d0 == 0.0 || d0 * d1 < 0.0) changes.push_back(k);
  }
  if (n > 0 && pc.a[n - 1] == pc.b[n - 1] && (changes.empty() || changes.back() != n - 2))
    changes.push_back(n - 2);
  if (changes.empty()) throw AnalysisError("no crossing in window");

  std::size_t k = changes.front();
  if (changes.size() > 1 && opts.p_reference) {
    double best = kInf;
    for (std::size_t c : changes) {
      const double dist = std::abs(0.5 * (pc.p[c] + pc.p[c + 1]) - *opts.p_reference);
      if (dist < best) {
        best = dist;
        k = c;
      }
    }
  }

  const std::size_t w = std::min(std::max<std::size_t>(opts.window, 2), n);
  const std::size_t half = (w - 2) / 2;
  std::size_t lo = k >= half ? k - half : 0;
  lo = std::min(lo, n - w);
  const std::vector<double> p(pc.p.begin() + lo, pc.p.begin() + lo + w);
  auto slice = [&](const std::vector<double>& v) { return std::vector<double>(v.begin() + lo, v.begin() + lo + w); };
  const double centre = 0.5 * (p.front() + p.back());
  const double scale = std::max(0.5 * (p.back() - p.front()), 1e-12);
  const Poly fa = fit_poly(p, slice(pc.a), slice(pc.a_err), centre, scale);
  const Poly fb = fit_poly(p, slice(pc.b), slice(pc.b_err), centre, scale);
  const auto diff = [&](double x) { return fa(x) - fb(x); };

  double left = pc.p[k], right = pc.p[k + 1];
  if (diff(left) * diff(right) > 0.0) {
    // The smoothed curves cross elsewhere in the window: take the sign
    // change of the fit nearest to the empirical one.
    const int steps = 400;
    double best = kInf;
    bool found = false;
    for (int s = 0; s < steps; ++s) {
      const double x0 = p.front() + (p.back() - p.front()) * s / steps;
      const double x1 = p.front() + (p.back() - p.front()) * (s + 1) / steps;
      if (diff(x0) * diff(x1) <= 0.0) {
        const double dist = std::abs(0.5 * (x0 + x1) - 0.5 * (pc.p[k] + pc.p[k + 1]));
        if (dist < best) {
          best = dist;
          left = x0;
          right = x1;
          found = true;
        }
      }
    }
    if (!found) throw AnalysisError("no crossing in window: fitted curves do not intersect");
  }
  double root = left;
  if (diff(left) != 0.0) {
    if (diff(right) == 0.0) {
      root = right;
    } else {
      const auto [a, b] = boost::math::tools::bisect(diff, left, right, boost::math::tools::eps_tolerance<double>(50));
      root = 0.5 * (a + b);
    }
  }
  return {root, 0.5 * (fa(root) + fb(root)), changes.size() > 1};
}

}  // namespace

CrossingPoint find_crossing(const ScalingDataset& ds, std::size_t L, const CrossingOptions& opts) {
  const auto pc = pair_curves(ds, L);
  const auto central = crossing_of(pc, opts);
  CrossingPoint out;
  out.L = L;
  out.p_cross = central.p;
  out.I_cross = central.I;
  out.multiple_roots = central.multiple;
  if (opts.bootstrap > 0) {
    std::vector<double> ps, Is;
    CrossingOptions inner = opts;
    inner.bootstrap = 0;
    if (!inner.p_reference) inner.p_reference = central.p;
    for (std::size_t b = 0; b < opts.bootstrap; ++b) {
      Rng rng(hash_words({opts.seed, static_cast<std::uint64_t>(StreamKind::bootstrap), L, b}));
      PairedCurves r = pc;
      for (std::size_t i = 0; i < r.p.size(); ++i) {
        r.a[i] = std::normal_distribution<double>(pc.a[i], pc.a_err[i])(rng);
        r.b[i] = std::normal_distribution<double>(pc.b[i], pc.b_err[i])(rng);
      }
      try {
        const auto c = crossing_of(r, inner);
        ps.push_back(c.p);
        Is.push_back(c.I);
      } catch (const AnalysisError&) {
        ++out.bootstrap_failed;
      }
    }
    out.p_cross_err = numerics::sample_stddev(ps);
    out.I_cross_err = numerics::sample_stddev(Is);
  }
  return out;
}

std::vector<CrossingPoint> find_crossings(const ScalingDataset& ds, const CrossingOptions& opts,
                                          std::vector<std::string>* gaps) {
  std::vector<CrossingPoint> out;
  for (std::size_t L : ds.sizes()) {
    if (!ds.has_size(2 * L)) continue;
    try {
      out.push_back(find_crossing(ds, L, opts));
    } catch (const AnalysisError& e) {
      if (gaps) gaps->push_back("crossing (" + std::to_string(L) + ", " + std::to_string(2 * L) + "): " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correction-to-scaling fits

namespace {

struct PModelFit {
  double chi2 = kInf;
  numerics::ParameterFit fit;
};

PModelFit fit_p_model(const std::vector<CrossingPoint>& pts, double p_c, double nu, double w1, double w2,
                      bool a2_zero) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd X(n, a2_zero ? 1 : 2);
  Eigen::VectorXd y(n);
  std::vector<double> err;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = pts[static_cast<std::size_t>(i)];
    const double L = static_cast<double>(pt.L);
    X(i, 0) = std::pow(L, -1.0 / nu - w1);
    if (!a2_zero) X(i, 1) = std::pow(L, -1.0 / nu - w2);
    y[i] = pt.p_cross - p_c;
    err.push_back(pt.p_cross_err);
  }
  PModelFit out;
  try {
    out.fit = numerics::fit_parameters(X, y, err);
    out.chi2 = out.fit.chi2;
  } catch (const AnalysisError&) {
  }
  return out;
}

}  // namespace

CorrectionFit fit_crossing_p(const std::vector<CrossingPoint>& points, double p_c, double nu,
                             const CrossingPOptions& opts) {
  if (points.size() < 4) throw AnalysisError("crossing p fit: need at least 4 crossing points");
  if (!(nu > 0.0)) throw std::invalid_argument("fit_crossing_p: nu must be positive");
  const std::size_t G = std::max<std::size_t>(opts.grid, 10);
  auto omega_at = [&](std::size_t k) {
    return opts.omega_min + (opts.omega_max - opts.omega_min) * static_cast<double>(k) / static_cast<double>(G - 1);
  };

  CorrectionFit out;
  if (opts.independent_omega2) {
    double best = kInf;
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j = i + 1; j < G; ++j) {
        const auto m = fit_p_model(points, p_c, nu, omega_at(i), omega_at(j), false);
        if (m.chi2 < best) {
          best = m.chi2;
          out.omega1 = omega_at(i);
          out.omega2 = omega_at(j);
          out.a1 = m.fit.coef[0];
          out.a2 = m.fit.coef[1];
          out.chi2 = m.chi2;
          out.residual_norm = m.fit.residual_norm;
        }
      }
    if (!std::isfinite(best)) throw AnalysisError("crossing p fit: no admissible (omega1, omega2)");
    out.omega1_lo = out.omega1_hi = out.omega1;
    out.flagged = true;  // not identified at the level of the constrained fit
    return out;
  }

  const auto chi2_at = [&](double w) { return fit_p_model(points, p_c, nu, w, 2.0 * w, opts.a2_zero).chi2; };
  std::vector<double> chi(G);
  std::size_t kmin = 0;
  for (std::size_t k = 0; k < G; ++k) {
    chi[k] = chi2_at(omega_at(k));
    if (chi[k] < chi[kmin]) kmin = k;
  }
  if (!std::isfinite(chi[kmin])) throw AnalysisError("crossing p fit: no admissible omega1");

  double w_best = omega_at(kmin);
  if (kmin > 0 && kmin + 1 < G) {
    const auto r = boost::math::tools::brent_find_minima(chi2_at, omega_at(kmin - 1), omega_at(kmin + 1), 40);
    if (r.second <= chi[kmin]) w_best = r.first;
  }
  const auto m = fit_p_model(points, p_c, nu, w_best, 2.0 * w_best, opts.a2_zero);
  out.omega1 = w_best;
  out.omega2 = 2.0 * w_best;
  out.a1 = m.fit.coef[0];
  out.a2 = opts.a2_zero ? 0.0 : m.fit.coef[1];
  out.chi2 = m.chi2;
  out.residual_norm = m.fit.residual_norm;

  out.omega1_lo = kInf;
  out.omega1_hi = -kInf;
  double chi_max = -kInf;
  for (std::size_t k = 0; k < G; ++k) {
    if (std::isfinite(chi[k])) chi_max = std::max(chi_max, chi[k]);
    if (chi[k] <= m.chi2 + 1.0) {
      out.omega1_lo = std::min(out.omega1_lo, omega_at(k));
      out.omega1_hi = std::max(out.omega1_hi, omega_at(k));
    }
  }
  out.omega1_lo = std::min(out.omega1_lo, w_best);
  out.omega1_hi = std::max(out.omega1_hi, w_best);
  out.flagged = chi_max - m.chi2 < 1.0 || kmin == 0 || kmin + 1 == G;
  return out;
}

CorrectionFit fit_crossing_I(const std::vector<CrossingPoint>& points, double omega1, Scheme scheme) {
  if (points.size() < 3) throw AnalysisError("crossing I fit: need at least 3 crossing points");
  const double factor = geometric_factor(scheme);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  std::vector<double> err;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    const double L = static_cast<double>(pt.L);
    X(i, 0) = 1.0;
    X(i, 1) = std::pow(L, -omega1);
    X(i, 2) = std::pow(L, -2.0 * omega1);
    y[i] = pt.I_cross / factor;
    err.push_back(pt.I_cross_err / factor);
  }
  const auto fit = numerics::fit_parameters(X, y, err);
  CorrectionFit out;
  out.omega1 = omega1;
  out.omega2 = 2.0 * omega1;
  out.c_over_3 = fit.coef[0];
  out.b1 = fit.coef[1];
  out.b2 = fit.coef[2];
  out.c_over_3_err = fit.err[0];
  out.chi2 = fit.chi2;
  out.residual_norm = fit.residual_norm;
  return out;
}

// ---------------------------------------------------------------------------
// Chord lengths and entropy fits

double chord_length(std::size_t L, std::size_t size) {
  if (size == 0 || size >= L) throw std::invalid_argument("chord_length: need 0 < size < L");
  const std::size_t s = std::min(size, L - size);
  return static_cast<double>(L) / std::numbers::pi *
         boost::math::sin_pi(static_cast<double>(s) / static_cast<double>(L));
}

namespace {

// sin(pi a) sin(pi b) = (cos(pi (a - b)) - cos(pi (a + b))) / 2, exact at the
// dyadic fractions the partitions produce.
double sin_pi_product(double a, double b) {
  return 0.5 * (boost::math::cos_pi(a - b) - boost::math::cos_pi(a + b));
}

}  // namespace

double geometric_factor(Scheme scheme) {
  const Partition part = make_partition(16, scheme);
  const double L = static_cast<double>(part.L);
  const double f_ab = static_cast<double>(part.A.size + part.B.size) / L;
  const double f_bc = static_cast<double>(part.B.size + part.C.size) / L;
  const double f_b = static_cast<double>(part.B.size) / L;
  const double f_abc = static_cast<double>(part.A.size + part.B.size + part.C.size) / L;
  return std::log2(sin_pi_product(f_ab, f_bc) / sin_pi_product(f_b, f_abc));
}

EntropyLogFit fit_entropy_log(const std::vector<EntropySample>& samples) {
  std::vector<double> distinct;
  for (const auto& s : samples) {
    if (!(s.chord_length > 0.0)) throw std::invalid_argument("fit_entropy_log: chord lengths must be positive");
    if (std::none_of(distinct.begin(), distinct.end(),
                     [&](double d) { return std::abs(d - s.chord_length) <= 1e-12 * d; }))
      distinct.push_back(s.chord_length);
  }
  if (distinct.size() < 3) throw AnalysisError("entropy log fit: need at least 3 distinct chord lengths");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  std::vector<double> err;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    X(i, 0) = std::log2(s.chord_length);
    X(i, 1) = 1.0;
    y[i] = s.S_mean;
    err.push_back(s.S_stderr);
  }
  const auto fit = numerics::fit_parameters(X, y, err);
  return {fit.coef[0], fit.coef[1], fit.err[0], fit.err[1], fit.chi2};
}

double c_tilde(double c_over_3) { return c_over_3 / std::numbers::ln2; }

}  // namespace mipt::scaling
