#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "fhtreg/optim.hpp"
#include "oracles.hpp"

using namespace fhtreg;

namespace {
// concave quadratic with known maximizer: f = -(theta - m)' A (theta - m)
struct Quadratic {
  Eigen::MatrixXd a;
  Eigen::VectorXd m;
  double operator()(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd d = theta - m;
    return -d.dot(a * d);
  }
};
}  // namespace

TEST_CASE("numeric gradient and hessian on a smooth test function") {
  // f(x, y) = -x^4 - 2 y^2 + x y + 3 x
  const Objective f = [](const Eigen::VectorXd& t) {
    return -std::pow(t[0], 4) - 2.0 * t[1] * t[1] + t[0] * t[1] + 3.0 * t[0];
  };
  Eigen::VectorXd at(2);
  at << 0.7, -1.2;
  const Eigen::VectorXd g = numeric_gradient(f, at);
  // analytic: df/dx = -4x^3 + y + 3, df/dy = -4y + x
  CHECK(g[0] == doctest::Approx(-4.0 * std::pow(0.7, 3) - 1.2 + 3.0).epsilon(1e-7));
  CHECK(g[1] == doctest::Approx(-4.0 * -1.2 + 0.7).epsilon(1e-7));

  const Eigen::MatrixXd h = numeric_hessian(f, at);
  CHECK(h(0, 0) == doctest::Approx(-12.0 * 0.49).epsilon(1e-4));
  CHECK(h(1, 1) == doctest::Approx(-4.0).epsilon(1e-4));
  CHECK(h(0, 1) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(h(0, 1) == h(1, 0));  // symmetrized
}

TEST_CASE("quadratic maximum is found to tight tolerance") {
  Eigen::MatrixXd a(3, 3);
  a << 4.0, 1.0, 0.0,  //
      1.0, 3.0, 0.5,   //
      0.0, 0.5, 2.0;
  Eigen::VectorXd m(3);
  m << 1.0, -2.0, 0.5;
  const Quadratic q{a, m};
  Eigen::VectorXd start = Eigen::VectorXd::Zero(3);
  const OptimResult res = maximize(q, start);
  CHECK(res.converged);
  CHECK((res.theta - m).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::fabs(res.value) < 1e-10);
  CHECK(res.gradient.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(res.iterations > 0);
}

TEST_CASE("badly scaled and curved surfaces still converge") {
  // Rosenbrock-style ridge, maximized form
  const Objective f = [](const Eigen::VectorXd& t) {
    const double a = 1.0 - t[0];
    const double b = t[1] - t[0] * t[0];
    return -(a * a + 100.0 * b * b);
  };
  Eigen::VectorXd start(2);
  start << -1.2, 1.0;
  OptimOptions opts;
  opts.max_iterations = 2000;
  const OptimResult res = maximize(f, start, opts);
  CHECK(res.converged);
  CHECK(std::fabs(res.theta[0] - 1.0) < 1e-4);
  CHECK(std::fabs(res.theta[1] - 1.0) < 1e-4);
}

TEST_CASE("multistart keeps the best mode of a bimodal surface") {
  // two unequal peaks at -2 (height 1) and +2 (height 2)
  const Objective f = [](const Eigen::VectorXd& t) {
    const double x = t[0];
    return std::exp(-(x + 2.0) * (x + 2.0)) + 2.0 * std::exp(-(x - 2.0) * (x - 2.0));
  };
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd s1(1), s2(1);
  s1 << -2.5;
  s2 << 2.5;
  starts.push_back(s1);
  starts.push_back(s2);
  const OptimResult res = maximize_multistart(f, starts);
  CHECK(res.theta[0] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-6));

  // single bad start alone finds only the minor peak
  const OptimResult minor = maximize(f, s1);
  CHECK(minor.theta[0] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("non-finite starting value is rejected") {
  const Objective f = [](const Eigen::VectorXd& t) {
    return t[0] > 0.0 ? std::log(t[0]) - t[0]
                      : -std::numeric_limits<double>::infinity();
  };
  Eigen::VectorXd bad(1);
  bad << -1.0;
  CHECK_THROWS(maximize(f, bad));
  CHECK_THROWS(maximize_multistart(f, {}));

  // from a valid start the barrier is respected and the max found
  Eigen::VectorXd ok(1);
  ok << 0.5;
  const OptimResult res = maximize(f, ok);
  CHECK(res.converged);
  CHECK(res.theta[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("optimizer reports a trace and respects the iteration cap") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd m(2);
  m << 3.0, -1.0;
  const Quadratic q{a, m};
  Eigen::VectorXd start = Eigen::VectorXd::Zero(2);
  const OptimResult res = maximize(q, start);
  CHECK_FALSE(res.trace.empty());

  OptimOptions strangled;
  strangled.max_iterations = 1;
  const OptimResult capped = maximize(q, start, strangled);
  CHECK(capped.iterations <= 1);
  // a single iteration of a fresh quasi-Newton run cannot meet both
  // convergence tests on this surface
  CHECK_FALSE(capped.converged);
}

TEST_CASE("gradient agrees with an independent five-point stencil") {
  const Objective f = [](const Eigen::VectorXd& t) {
    return -std::exp(t[0]) * (t[1] * t[1] + 1.0) + std::sin(t[0] * t[1]);
  };
  Eigen::VectorXd at(2);
  at << 0.3, -0.8;
  const Eigen::VectorXd g2 = numeric_gradient(f, at);
  const Eigen::VectorXd g5 = oracles::gradient_5point(f, at);
  CHECK((g2 - g5).cwiseAbs().maxCoeff() < 1e-6);
}
