#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace fhtreg {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimOptions {
  double value_tol = 1e-9;  // relative objective change
  double grad_tol = 1e-6;   // gradient sup-norm, relative to 1 + |objective|
  int max_iterations = 500;
  double gradient_step = 1e-6;  // central-difference scale, h = step * max(1, |theta|)
};

struct OptimResult {
  Eigen::VectorXd theta;
  double value = 0.0;
  Eigen::VectorXd gradient;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> trace;  // last iterations, kept for diagnostics
};

/// Central-difference gradient with per-coordinate steps
/// h_i = step * max(1, |theta_i|), the step rounded to be exactly
/// representable around theta_i.
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& theta,
                                 double step = 1e-6);

/// Central second differences, symmetrized; step defaults looser than the
/// gradient's because second differences lose more precision to cancellation.
Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& theta,
                                double step = 1e-4);

/// Quasi-Newton (BFGS) ascent with backtracking line search and numeric
/// gradients; converged means both the relative objective change and the
/// gradient sup-norm dropped below their tolerances.
OptimResult maximize(const Objective& f, const Eigen::VectorXd& start,
                     const OptimOptions& opts = {});

/// Runs maximize from several starts and keeps the best: highest objective,
/// ties (within 1e-8 relative) broken by fewest iterations.
OptimResult maximize_multistart(const Objective& f,
                                const std::vector<Eigen::VectorXd>& starts,
                                const OptimOptions& opts = {});

}  // namespace fhtreg
