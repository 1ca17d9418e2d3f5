#include "mipt/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "mipt/errors.hpp"

namespace mipt::numerics {

LeastSquaresFit weighted_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  if (X.rows() != y.size() || y.size() != w.size()) throw std::invalid_argument("weighted_least_squares: size mismatch");
  if (X.rows() < X.cols()) throw AnalysisError("least squares: fewer points than parameters");
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd A = sw.asDiagonal() * X;
  const Eigen::VectorXd b = sw.asDiagonal() * y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < X.cols()) throw AnalysisError("least squares: degenerate design matrix");
  LeastSquaresFit fit;
  fit.coef = qr.solve(b);
  const Eigen::MatrixXd normal = A.transpose() * A;
  fit.covariance = normal.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  fit.chi2 = (b - A * fit.coef).squaredNorm();
  return fit;
}

Eigen::VectorXd inverse_variance_weights(const std::vector<double>& sigma) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(sigma.size()));
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) return Eigen::VectorXd::Ones(w.size());
    w[static_cast<Eigen::Index>(i)] = 1.0 / (sigma[i] * sigma[i]);
  }
  return w;
}

namespace {

struct Objective {
  const std::function<double(const std::vector<double>&)>* f;
  std::vector<double> buffer;
};

double gsl_trampoline(const gsl_vector* v, void* params) {
  auto* obj = static_cast<Objective*>(params);
  for (std::size_t i = 0; i < obj->buffer.size(); ++i) obj->buffer[i] = gsl_vector_get(v, i);
  const double value = (*obj->f)(obj->buffer);
  return std::isfinite(value) ? value : GSL_POSINF;
}

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& x0, const SimplexOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("minimize_simplex: empty parameter vector");
  static std::once_flag quiet_gsl;
  std::call_once(quiet_gsl, [] { gsl_set_error_handler_off(); });
  Objective obj{&f, std::vector<double>(n)};
  gsl_multimin_function fn{&gsl_trampoline, n, &obj};

  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);
  if (opts.steps.empty()) {
    gsl_vector_set_all(step, opts.initial_step);
  } else {
    if (opts.steps.size() != n) throw std::invalid_argument("minimize_simplex: steps size mismatch");
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(step, i, opts.steps[i]);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, step);

  SimplexResult res;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && res.iterations < opts.max_iterations) {
    ++res.iterations;
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opts.size_tolerance);
  }
  res.converged = status == GSL_SUCCESS;
  res.value = s->fval;
  res.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(s->x, i);

  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return res;
}

ParameterFit fit_parameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<double>& sigma) {
  const Eigen::VectorXd w = inverse_variance_weights(sigma);
  const bool weighted = sigma.size() == static_cast<std::size_t>(y.size()) &&
                        std::all_of(sigma.begin(), sigma.end(), [](double s) { return s > 0.0 && std::isfinite(s); });
  const auto fit = weighted_least_squares(X, y, weighted ? w : Eigen::VectorXd::Ones(y.size()));
  ParameterFit out;
  out.coef = fit.coef;
  out.chi2 = fit.chi2;
  out.residual_norm = (y - X * fit.coef).norm();
  Eigen::MatrixXd cov = fit.covariance;
  const auto dof = X.rows() - X.cols();
  if (!weighted && dof > 0) cov *= fit.chi2 / static_cast<double>(dof);
  out.err = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace mipt::numerics
