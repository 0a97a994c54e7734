#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fhtreg/fht.hpp"
#include "fhtreg/process.hpp"
#include "fhtreg/rng.hpp"
#include "oracles.hpp"

using namespace fhtreg;

namespace {
constexpr double kSqrt2PiInv = 0.3989422804014326779399;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fabs(want);
}

// random but reproducible parameter draws used by grid checks
IgParams random_params(RngStream& rng) {
  return IgParams{rng.uniform(-2.0, 1.0), rng.uniform(0.5, 3.0),
                  rng.uniform(0.5, 4.0)};
}
}  // namespace

TEST_CASE("hitting-time density: closed-form anchor points") {
  // at r = 1 with mu = -1, x0 = 1 the exponent vanishes entirely
  CHECK(ig_pdf(1.0, {-1.0, 1.0, 1.0}) ==
        doctest::Approx(kSqrt2PiInv).epsilon(1e-14));
  // frozen 50-digit reference at a generic point
  CHECK(rel_err(ig_pdf(2.0, {-0.7, 1.3, 1.9}), 0.2240100251078380026767) < 1e-13);
  // essential singularity at the origin
  CHECK(ig_pdf(1e-8, {-1.0, 1.0, 1.0}) < 1e-100);
  CHECK(ig_pdf(1e-300, {-1.0, 1.0, 1.0}) == 0.0);
  CHECK_THROWS(ig_pdf(0.0, {-1.0, 1.0, 1.0}));
  CHECK_THROWS(ig_pdf(-1.0, {-1.0, 1.0, 1.0}));
  CHECK_THROWS(ig_pdf(1.0, {-1.0, 0.0, 1.0}));
  CHECK_THROWS(ig_pdf(1.0, {-1.0, 1.0, 0.0}));
}

TEST_CASE("hitting-time density integrates to the finite-hit probability") {
  const IgParams proper{-0.5, 2.0, 3.0};
  const double mass = oracles::integrate(
      [&](double r) { return ig_pdf(r, proper); }, 0.0,
      std::numeric_limits<double>::infinity(), 1e-12);
  CHECK(std::fabs(mass - 1.0) < 1e-8);

  // improper when the drift points away from the boundary
  const IgParams improper{0.5, 1.0, 1.0};
  const double mass_improper = oracles::integrate(
      [&](double r) { return ig_pdf(r, improper); }, 0.0,
      std::numeric_limits<double>::infinity(), 1e-12);
  CHECK(std::fabs(mass_improper - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("hitting-time cdf: anchor points and limits") {
  CHECK(std::fabs(ig_cdf(1e6, {-1.0, 1.0, 1.0}) - 1.0) < 1e-9);
  // outward drift: the cdf saturates at the finite-hit mass e^{-2 x0 mu / s2}
  CHECK(std::fabs(ig_cdf(1e6, {0.5, 1.0, 1.0}) - std::exp(-1.0)) < 1e-9);
  CHECK(rel_err(ig_cdf(2.0, {-0.7, 1.3, 1.9}), 0.5357174915628959344629) < 1e-13);
  CHECK_THROWS(ig_cdf(0.0, {-1.0, 1.0, 1.0}));
}

TEST_CASE("cdf equals the integral of the density on parameter draws") {
  RngStream rng(2024);
  for (int draw = 0; draw < 5; ++draw) {
    const IgParams p = random_params(rng);
    for (int i = 1; i <= 50; ++i) {
      const double r = 0.2 * i;
      const double by_quadrature = oracles::integrate(
          [&](double u) { return ig_pdf(u, p); }, 0.0, r, 1e-12);
      CHECK(std::fabs(ig_cdf(r, p) - by_quadrature) < 1e-8);
    }
  }
}

TEST_CASE("cdf is nondecreasing and bounded by the finite-hit mass") {
  RngStream rng(7);
  for (int draw = 0; draw < 20; ++draw) {
    const IgParams p = random_params(rng);
    const double cap = prob_finite_fht(p);
    double prev = 0.0;
    for (double r = 0.05; r < 40.0; r *= 1.4) {
      const double f = ig_cdf(r, p);
      CHECK(f >= prev - 1e-15);
      CHECK(f <= cap + 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("cdf slope reproduces the density") {
  RngStream rng(99);
  for (int draw = 0; draw < 5; ++draw) {
    const IgParams p = random_params(rng);
    for (double r : {0.3, 0.8, 1.5, 3.0, 6.0}) {
      const double h = 1e-5 * std::max(1.0, r);
      const double slope = (ig_cdf(r + h, p) - ig_cdf(r - h, p)) / (2.0 * h);
      const double f = ig_pdf(r, p);
      if (f > 1e-12) CHECK(rel_err(slope, f) < 1e-6);
    }
  }
}

TEST_CASE("log survival stays accurate deep in the tail") {
  CHECK(rel_err(ig_log_survival(2.0, {-0.7, 1.3, 1.9}),
                -0.7672620576422050878406) < 1e-12);
  CHECK(rel_err(ig_log_survival(80.0, {-1.0, 1.0, 1.0}),
                -45.84091785267909516806) < 1e-12);
  // consistency with 1 - cdf where that is representable
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    const IgParams p{-0.8, 1.5, 2.0};
    CHECK(rel_err(ig_survival(r, p), 1.0 - ig_cdf(r, p)) < 1e-10);
  }
}

TEST_CASE("finite-hit probability formula") {
  CHECK(prob_finite_fht({-2.0, 1.0, 1.0}) == 1.0);
  CHECK(prob_finite_fht({0.0, 1.0, 1.0}) == 1.0);
  CHECK(prob_finite_fht({0.5, 1.0, 1.0}) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("finite-hit probability matches the simulated hit fraction") {
  const WienerSpec spec{0.5, 1.0, 1.0};
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    if (sample_wiener_fht(spec, 0.25, 200.0, 321, i).has_value()) ++hits;
  }
  const double want = prob_finite_fht({spec.mu, spec.sigma2, spec.x0});
  const double se = std::sqrt(want * (1.0 - want) / n);
  CHECK(std::fabs(static_cast<double>(hits) / n - want) <= 3.0 * se);
}

TEST_CASE("exact hitting-time sampler follows the analytic law") {
  const int n = 20000;
  SUBCASE("proper law, negative drift") {
    const IgParams p{-1.0, 1.0, 1.0};
    RngStream rng(818);
    std::vector<double> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) {
      auto s = ig_sample(p, rng);
      REQUIRE(s.has_value());
      draws.push_back(*s);
    }
    CHECK(oracles::ks_statistic(draws, [&](double r) { return ig_cdf(r, p); }) <
          0.0138);  // 0.001-level KS critical value at n = 2e4
  }
  SUBCASE("improper law, positive drift") {
    const IgParams p{0.7, 1.0, 1.0};
    RngStream rng(919);
    std::vector<double> draws;
    int infinite = 0;
    for (int i = 0; i < n; ++i) {
      auto s = ig_sample(p, rng);
      if (s) {
        draws.push_back(*s);
      } else {
        ++infinite;
      }
    }
    const double p_fin = prob_finite_fht(p);
    const double se = std::sqrt(p_fin * (1.0 - p_fin) / n);
    CHECK(std::fabs(1.0 - static_cast<double>(infinite) / n - p_fin) <= 3.5 * se);
    // conditional on being finite the law is the normalized cdf
    CHECK(oracles::ks_statistic(
              draws, [&](double r) { return ig_cdf(r, p) / p_fin; }) < 0.016);
  }
}

TEST_CASE("trial-count pmf: geometric reduction and normalization") {
  const BernoulliSpec geom{0.3, 1};
  for (long s = 1; s <= 40; ++s) {
    const double want = 0.3 * std::pow(0.7, double(s - 1));
    CHECK(rel_err(negbin_fht_pmf(s, geom), want) < 1e-12);
  }
  CHECK_THROWS(negbin_fht_pmf(2, BernoulliSpec{0.4, 3}));

  // sum to 1 within 1e-10, truncating once cumulative mass reaches 1 - 1e-12
  const BernoulliSpec spec{0.25, 4};
  double cum = 0.0;
  for (long s = spec.m; s < 100000 && cum < 1.0 - 1e-12; ++s) {
    cum += negbin_fht_pmf(s, spec);
  }
  CHECK(std::fabs(cum - 1.0) < 1e-10);
}

TEST_CASE("trial-count pmf matches direct Bernoulli simulation") {
  const BernoulliSpec spec{0.4, 3};
  const int n = 1000000;
  std::vector<long> counts(200, 0);
  RngStream rng(5150);
  for (int i = 0; i < n; ++i) {
    long trials = 0;
    int successes = 0;
    while (successes < spec.m) {
      ++trials;
      if (rng.bernoulli(spec.p)) ++successes;
    }
    if (trials < long(counts.size())) ++counts[static_cast<std::size_t>(trials)];
  }
  double tv = 0.0;
  for (long s = spec.m; s < long(counts.size()); ++s) {
    const double emp = static_cast<double>(counts[static_cast<std::size_t>(s)]) / n;
    tv += std::fabs(emp - negbin_fht_pmf(s, spec));
  }
  CHECK(0.5 * tv <= 0.005);
}

TEST_CASE("event-arrival density: exponential reduction and mean") {
  const PoissonSpec one{1.7, 1};
  for (double t : {0.1, 0.5, 1.0, 2.5, 6.0}) {
    CHECK(rel_err(erlang_fht_pdf(t, one), 1.7 * std::exp(-1.7 * t)) < 1e-13);
    CHECK(rel_err(erlang_fht_cdf(t, one), -std::expm1(-1.7 * t)) < 1e-12);
  }
  CHECK_THROWS(erlang_fht_pdf(0.0, one));
  CHECK_THROWS(erlang_fht_cdf(-1.0, one));

  const PoissonSpec spec{2.0, 4};
  const double mean = oracles::integrate(
      [&](double t) { return t * erlang_fht_pdf(t, spec); }, 0.0,
      std::numeric_limits<double>::infinity(), 1e-12);
  CHECK(std::fabs(mean - double(spec.m) / spec.lambda) < 1e-8);
}

TEST_CASE("event-arrival cdf matches arrival-process simulation") {
  const PoissonSpec spec{2.0, 4};
  const int n = 100000;
  RngStream rng(2718);
  std::vector<double> arrivals;
  arrivals.reserve(n);
  for (int i = 0; i < n; ++i) {
    double t = 0.0;
    for (long k = 0; k < spec.m; ++k) t += rng.exponential(spec.lambda);
    arrivals.push_back(t);
  }
  CHECK(oracles::ks_statistic(
            arrivals, [&](double t) { return erlang_fht_cdf(t, spec); }) < 0.02);
}

TEST_CASE("degradation survival: boundary cases") {
  GammaSpec spec{1.0, 0.5, 2.0, 0.7};
  CHECK(gamma_fht_survival(0.0, spec) == 1.0);
  GammaSpec immune{1.0, 0.5, 2.0, 0.0};
  for (double t : {0.0, 0.5, 2.0, 10.0, 100.0}) {
    CHECK(gamma_fht_survival(t, immune) == 1.0);
  }
  CHECK_THROWS(gamma_fht_survival(-0.5, spec));
}

TEST_CASE("degradation survival matches path simulation") {
  const GammaSpec spec{1.0, 0.5, 2.0, 0.7};
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k) grid.push_back(0.25 * k);
  const int n = 100000;
  std::vector<int> alive(grid.size(), 0);
  for (int i = 0; i < n; ++i) {
    const SamplePath path = sample_gamma_path(spec, grid, 1618, i);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (path.states[k] > 0.0) ++alive[k];
    }
  }
  double d = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double emp = static_cast<double>(alive[k]) / n;
    d = std::max(d, std::fabs(emp - gamma_fht_survival(grid[k], spec)));
  }
  CHECK(d < 0.02);
}

TEST_CASE("chain stopping pmf: geometric case and path-length constraint") {
  MarkovChainSpec spec;
  spec.transition = Eigen::MatrixXd(2, 2);
  spec.transition << 0.7, 0.3, 0.0, 1.0;
  spec.x0 = 0;
  spec.boundary = {1};
  const DiscreteFhtPmf pmf = markov_fht_pmf(spec, 50);
  CHECK(pmf.support_offset == 1);
  REQUIRE(pmf.probabilities.size() == 50);
  for (int k = 1; k <= 50; ++k) {
    const double want = std::pow(0.7, double(k - 1)) * 0.3;
    CHECK(rel_err(pmf.probabilities[static_cast<std::size_t>(k - 1)], want) < 1e-12);
  }

  // boundary reachable only after two steps: P(S = 1) must vanish
  MarkovChainSpec two_step;
  two_step.transition = Eigen::MatrixXd(3, 3);
  two_step.transition << 0.0, 1.0, 0.0,  //
      0.0, 0.0, 1.0,                     //
      0.0, 0.0, 1.0;
  two_step.x0 = 0;
  two_step.boundary = {2};
  const DiscreteFhtPmf p2 = markov_fht_pmf(two_step, 5);
  CHECK(p2.probabilities[0] == 0.0);
  CHECK(p2.probabilities[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("chain stopping pmf agrees with exhaustive path enumeration") {
  // dense 4-state chain with every transition possible; the oracle walks
  // all state sequences of length <= 10 and accumulates path probabilities
  RngStream rng(4444);
  Eigen::MatrixXd t(4, 4);
  for (int i = 0; i < 4; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      t(i, j) = 0.1 + rng.uniform();
      row_sum += t(i, j);
    }
    for (int j = 0; j < 3; ++j) t(i, j) /= row_sum;
    t(i, 3) = 1.0 - t(i, 0) - t(i, 1) - t(i, 2);
  }
  MarkovChainSpec spec;
  spec.transition = t;
  spec.x0 = 0;
  spec.boundary = {3};
  const DiscreteFhtPmf pmf = markov_fht_pmf(spec, 10);
  const std::vector<double> want = oracles::enumerate_markov_pmf(t, 0, {3}, 10);
  REQUIRE(pmf.probabilities.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) {
    CHECK(std::fabs(pmf.probabilities[k] - want[k]) < 1e-12);
  }
}

TEST_CASE("chain stopping mass plus deficiency is one across random chains") {
  RngStream rng(31337);
  for (int rep = 0; rep < 120; ++rep) {
    const int n = 2 + int(rng.uniform() * 5.0);  // 2..6 states
    Eigen::MatrixXd t(n, n);
    for (int i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        t(i, j) = rng.uniform_pos();
        row_sum += t(i, j);
      }
      double acc = 0.0;
      for (int j = 0; j + 1 < n; ++j) {
        t(i, j) /= row_sum;
        acc += t(i, j);
      }
      t(i, n - 1) = 1.0 - acc;  // exact row sum
    }
    MarkovChainSpec spec;
    spec.transition = t;
    spec.x0 = 0;
    spec.boundary = {n - 1};
    const DiscreteFhtPmf pmf = markov_fht_pmf(spec, 50);
    double mass = pmf.deficiency;
    for (double q : pmf.probabilities) {
      CHECK(q >= 0.0);
      mass += q;
    }
    CHECK(std::fabs(mass - 1.0) < 1e-10);
  }
}
