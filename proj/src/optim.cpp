#include "fhtreg/optim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace fhtreg {

namespace {

// round the step so that theta + h and theta - h are exact floating-point
// neighbors of theta; removes one source of finite-difference error
double representable_step(double theta, double step) {
  const double h = step * std::max(1.0, std::abs(theta));
  volatile double bumped = theta + h;
  return bumped - theta;
}

std::string iteration_line(int it, double value, double step, double grad_norm) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "iter %d: loglik %.10g, step %.3g, grad sup-norm %.3g",
                it, value, step, grad_norm);
  return buf;
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& theta,
                                 double step) {
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd point = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double h = representable_step(theta(i), step);
    point(i) = theta(i) + h;
    const double up = f(point);
    point(i) = theta(i) - h;
    const double down = f(point);
    point(i) = theta(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& theta,
                                double step) {
  const Eigen::Index n = theta.size();
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd point = theta;
  const double center = f(theta);
  std::vector<double> h(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    h[static_cast<std::size_t>(i)] = representable_step(theta(i), step);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = h[static_cast<std::size_t>(i)];
    point(i) = theta(i) + hi;
    const double up = f(point);
    point(i) = theta(i) - hi;
    const double down = f(point);
    point(i) = theta(i);
    hess(i, i) = (up - 2.0 * center + down) / (hi * hi);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double hj = h[static_cast<std::size_t>(j)];
      point(i) = theta(i) + hi;
      point(j) = theta(j) + hj;
      const double pp = f(point);
      point(j) = theta(j) - hj;
      const double pm = f(point);
      point(i) = theta(i) - hi;
      const double mm = f(point);
      point(j) = theta(j) + hj;
      const double mp = f(point);
      point(i) = theta(i);
      point(j) = theta(j);
      hess(i, j) = hess(j, i) = (pp - pm - mp + mm) / (4.0 * hi * hj);
    }
  }
  return hess;
}

OptimResult maximize(const Objective& f, const Eigen::VectorXd& start,
                     const OptimOptions& opts) {
  if (start.size() == 0) throw std::invalid_argument("empty parameter vector");
  const Eigen::Index n = start.size();
  OptimResult res;
  res.theta = start;
  res.value = f(start);
  if (!std::isfinite(res.value)) {
    throw std::invalid_argument("objective not finite at the starting point");
  }
  Eigen::VectorXd grad = numeric_gradient(f, res.theta, opts.gradient_step);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  constexpr std::size_t kTraceKeep = 20;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    Eigen::VectorXd direction = hinv * grad;
    if (direction.dot(grad) <= 0.0) {
      // curvature approximation went bad; fall back to steepest ascent
      hinv.setIdentity();
      direction = grad;
    }
    // Armijo backtracking on the ascent direction
    const double slope = direction.dot(grad);
    double step = 1.0;
    double new_value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd new_theta;
    bool improved = false;
    for (int half = 0; half < 60; ++half) {
      new_theta = res.theta + step * direction;
      new_value = f(new_theta);
      if (std::isfinite(new_value) && new_value >= res.value + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    // the finite-difference gradient carries noise proportional to the
    // objective's magnitude, so the gradient test must scale the same way
    const double grad_tol = opts.grad_tol * (1.0 + std::abs(res.value));
    if (!improved) {
      // no ascent left along this direction at representable step sizes
      res.converged = grad.lpNorm<Eigen::Infinity>() < grad_tol;
      break;
    }
    Eigen::VectorXd new_grad = numeric_gradient(f, new_theta, opts.gradient_step);
    const Eigen::VectorXd s = new_theta - res.theta;
    const Eigen::VectorXd y = new_grad - grad;
    const double sy = -s.dot(y);  // positive when curvature is concave along s
    if (sy > 1e-12 * s.norm() * y.norm()) {
      // BFGS update of the inverse Hessian of the negated objective
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd outer = s * (-y).transpose() * hinv;
      hinv += rho * ((1.0 + rho * (-y).dot(hinv * -y)) * (s * s.transpose())) -
              rho * (outer + outer.transpose());
    }
    const double change = new_value - res.value;
    res.theta = new_theta;
    res.value = new_value;
    grad = new_grad;
    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    res.trace.push_back(iteration_line(it, new_value, step, grad_norm));
    if (res.trace.size() > kTraceKeep) res.trace.erase(res.trace.begin());
    if (std::abs(change) < opts.value_tol * (std::abs(new_value) + 1.0) &&
        grad_norm < opts.grad_tol * (1.0 + std::abs(new_value))) {
      res.converged = true;
      break;
    }
  }
  res.gradient = grad;
  return res;
}

OptimResult maximize_multistart(const Objective& f,
                                const std::vector<Eigen::VectorXd>& starts,
                                const OptimOptions& opts) {
  if (starts.empty()) throw std::invalid_argument("at least one start required");
  OptimResult best;
  bool have_best = false;
  for (const auto& start : starts) {
    OptimResult cand;
    try {
      cand = maximize(f, start, opts);
    } catch (const std::invalid_argument&) {
      if (!have_best && &start == &starts.back()) throw;
      continue;  // start out of the objective's domain; others may be fine
    }
    if (!have_best) {
      best = std::move(cand);
      have_best = true;
      continue;
    }
    const double tie_band = 1e-8 * (std::abs(best.value) + 1.0);
    const bool tied = std::abs(cand.value - best.value) <= tie_band;
    if ((tied && cand.iterations < best.iterations) ||
        (!tied && cand.value > best.value)) {
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace fhtreg
