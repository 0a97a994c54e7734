#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fhtreg/rng.hpp"
#include "fhtreg/timescale.hpp"

using namespace fhtreg;

namespace {
// half time in each of two categories up to every breakpoint
ExposureTable half_and_half(double horizon) {
  ExposureTable table;
  table.times = {0.0, horizon / 2.0, horizon};
  table.cum = Eigen::MatrixXd(3, 2);
  for (int i = 0; i < 3; ++i) {
    table.cum(i, 0) = table.times[static_cast<std::size_t>(i)] / 2.0;
    table.cum(i, 1) = table.times[static_cast<std::size_t>(i)] / 2.0;
  }
  return table;
}
}  // namespace

TEST_CASE("analytic transform: anchors and monotonicity") {
  AnalyticTimeSpec unit{1.0, 1.0};
  CHECK(analytic_running_time(0.0, unit) == 0.0);
  CHECK(analytic_running_time(std::log(2.0), unit) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS(analytic_running_time(-0.1, unit));
  CHECK_THROWS(analytic_running_time(1.0, AnalyticTimeSpec{0.0, 1.0}));
  CHECK_THROWS(analytic_running_time(1.0, AnalyticTimeSpec{1.0, -2.0}));

  RngStream rng(100);
  for (int draw = 0; draw < 20; ++draw) {
    AnalyticTimeSpec spec{rng.uniform(0.1, 3.0), rng.uniform(0.3, 2.5)};
    // probe only out to lambda t^gamma = 25: past ~37 the transform rounds
    // to exactly 1 in double precision and strict bounds become vacuous
    const double t_cap = std::pow(25.0 / spec.lambda, 1.0 / spec.gamma);
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double r = analytic_running_time(t_cap * i / 1000.0, spec);
      CHECK(r > prev);
      CHECK(r < 1.0);
      prev = r;
    }
  }
}

TEST_CASE("composite scale: unit weights collapse to calendar time") {
  const ExposureTable table = half_and_half(10.0);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  for (double t : {0.0, 1.0, 3.7, 5.0, 9.99, 10.0}) {
    CHECK(composite_running_time(t, table, ones) ==
          doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("composite scale: single category is the numeraire") {
  ExposureTable table;
  table.times = {0.0, 4.0};
  table.cum = Eigen::MatrixXd(2, 1);
  table.cum << 0.0, 4.0;
  Eigen::VectorXd one(1);
  one << 1.0;
  for (double t : {0.0, 0.5, 2.0, 4.0}) {
    CHECK(composite_running_time(t, table, one) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("composite scale: double-weighted category runs the clock faster") {
  const ExposureTable table = half_and_half(8.0);
  Eigen::VectorXd alphas(2);
  alphas << 2.0, 1.0;
  for (double t : {1.0, 2.0, 5.0, 8.0}) {
    // half the elapsed time counts twice: r = 2*(t/2) + 1*(t/2) = 1.5 t
    CHECK(composite_running_time(t, table, alphas) ==
          doctest::Approx(1.5 * t).epsilon(1e-12));
  }
}

TEST_CASE("composite scale enforces the accounting constraint with a diagnostic") {
  ExposureTable table;
  table.times = {0.0, 2.0};
  table.cum = Eigen::MatrixXd(2, 2);
  table.cum << 0.0, 0.0,  //
      1.0, 0.9;           // sums to 1.9, not 2
  CHECK_THROWS_WITH_AS(table.validate(),
                       doctest::Contains("account for all calendar time"),
                       std::invalid_argument);
}

TEST_CASE("composite scale rejects times beyond the tabulated horizon") {
  const ExposureTable table = half_and_half(4.0);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  CHECK_THROWS(composite_running_time(4.5, table, ones));
  CHECK_THROWS(composite_running_time(-0.5, table, ones));
}

TEST_CASE("unit-weight collapse holds over random exposure tables") {
  RngStream rng(2211);
  for (int rep = 0; rep < 50; ++rep) {
    const int n_break = 2 + int(rng.uniform() * 4.0);
    const int n_cat = 1 + int(rng.uniform() * 3.0);
    ExposureTable table;
    table.times.push_back(0.0);
    table.cum = Eigen::MatrixXd::Zero(n_break, n_cat);
    for (int i = 1; i < n_break; ++i) {
      const double gap = rng.uniform(0.2, 2.0);
      table.times.push_back(table.times.back() + gap);
      // split the interval over categories with random shares that sum to
      // the gap exactly (last share takes the remainder)
      double used = 0.0;
      for (int j = 0; j + 1 < n_cat; ++j) {
        const double share = gap * rng.uniform() / n_cat;
        table.cum(i, j) = table.cum(i - 1, j) + share;
        used += share;
      }
      table.cum(i, n_cat - 1) = table.cum(i - 1, n_cat - 1) + (gap - used);
    }
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n_cat);
    for (int k = 0; k <= 20; ++k) {
      const double t = table.times.back() * k / 20.0;
      CHECK(composite_running_time(t, table, ones) ==
            doctest::Approx(t).epsilon(1e-9));
    }
    // nondecreasing for arbitrary nonnegative weights
    Eigen::VectorXd alphas(n_cat);
    for (int j = 0; j < n_cat; ++j) alphas[j] = rng.uniform(0.0, 3.0);
    alphas[n_cat - 1] = 1.0;
    double prev = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double t = table.times.back() * k / 40.0;
      const double r = composite_running_time(t, table, alphas);
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("inversion: analytic transform and round trips") {
  AnalyticTimeSpec unit{1.0, 1.0};
  const InvertedTime inv = invert_running_time(0.5, unit);
  CHECK_FALSE(inv.is_interval());
  CHECK(inv.lower == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  RngStream rng(404);
  for (int i = 0; i < 100; ++i) {
    AnalyticTimeSpec spec{rng.uniform(0.2, 2.0), rng.uniform(0.4, 2.0)};
    // the inverse amplifies the rounding of r by e^{lambda t^gamma}, so the
    // round trip is only meaningful while that exponent stays moderate
    const double t_cap =
        std::min(5.0, std::pow(12.0 / spec.lambda, 1.0 / spec.gamma));
    const double t = rng.uniform(0.01, t_cap);
    const double r = analytic_running_time(t, spec);
    const InvertedTime back = invert_running_time(r, spec);
    CHECK(std::fabs(back.lower - t) < 1e-9);
  }
  // out-of-range running time rejected (transform is bounded by 1)
  CHECK_THROWS(invert_running_time(1.5, unit));
  CHECK_THROWS(invert_running_time(-0.1, unit));
}

TEST_CASE("inversion: composite round trip and flat segments") {
  const ExposureTable table = half_and_half(6.0);
  Eigen::VectorXd alphas(2);
  alphas << 2.0, 1.0;
  for (double t : {0.5, 2.0, 4.4, 6.0}) {
    const double r = composite_running_time(t, table, alphas);
    const InvertedTime back = invert_running_time(r, table, alphas);
    CHECK_FALSE(back.is_interval());
    CHECK(std::fabs(back.lower - t) < 1e-9);
  }

  // zero weight on the only occupied category freezes the clock: the
  // preimage of the frozen value is the whole flat calendar interval
  ExposureTable phased;
  phased.times = {0.0, 1.0, 2.0, 3.0};
  phased.cum = Eigen::MatrixXd(4, 2);
  phased.cum << 0.0, 0.0,  //
      1.0, 0.0,            // category 1 only during [0,1]
      1.0, 1.0,            // category 2 only during [1,2]
      2.0, 1.0;            // category 1 again during [2,3]
  Eigen::VectorXd frozen(2);
  frozen << 0.0, 1.0;
  CHECK(composite_running_time(0.3, phased, frozen) == 0.0);
  // r = 0.5 is reached mid-way through the running stretch: a single point
  const InvertedTime mid = invert_running_time(0.5, phased, frozen);
  CHECK_FALSE(mid.is_interval());
  CHECK(mid.lower == doctest::Approx(1.5).epsilon(1e-10));
  // the clock is frozen over [0,1] and again over [2,3]; those running-time
  // values map back to whole calendar intervals
  const InvertedTime start = invert_running_time(0.0, phased, frozen);
  CHECK(start.is_interval());
  CHECK(start.lower == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(start.upper == doctest::Approx(1.0).epsilon(1e-10));
  const InvertedTime end = invert_running_time(1.0, phased, frozen);
  CHECK(end.is_interval());
  CHECK(end.lower == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(end.upper == doctest::Approx(3.0).epsilon(1e-10));
}
