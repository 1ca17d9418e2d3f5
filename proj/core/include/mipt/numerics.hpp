#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

namespace mipt::numerics {

struct LeastSquaresFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd covariance;  // (X^T W X)^-1
  double chi2 = 0.0;           // sum of w * residual^2
};

/// Minimizes sum_i w_i (y_i - X_i . coef)^2. Throws AnalysisError when the
/// weighted design matrix is rank deficient.
LeastSquaresFit weighted_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w);

/// Weights 1/sigma^2, or all ones when any sigma is missing or non-positive.
Eigen::VectorXd inverse_variance_weights(const std::vector<double>& sigma);

struct SimplexOptions {
  double initial_step = 0.1;
  std::vector<double> steps;  // per-coordinate initial steps; overrides initial_step
  double size_tolerance = 1e-7;
  std::size_t max_iterations = 4000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization of f from x0.
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& x0, const SimplexOptions& opts = {});

/// Weighted least squares with parameter standard errors. Uses 1/sigma^2
/// weights when every sigma is positive; otherwise unit weights with the
/// covariance scaled by the residual variance.
struct ParameterFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd err;
  double chi2 = 0.0;
  double residual_norm = 0.0;  // unweighted
};
ParameterFit fit_parameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<double>& sigma);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(const std::vector<double>& xs);

}  // namespace mipt::numerics
