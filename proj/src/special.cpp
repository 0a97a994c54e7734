#include "fhtreg/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fhtreg {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kLn2 = 0.69314718055994530941723212145818;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_norm_cdf(double x) {
  if (x > -1.0) {
    // erfc-based value is well conditioned here
    return std::log(norm_cdf(x));
  }
  if (x > -36.0) {
    // log of scaled complementary error function; erfc(z)*exp(z^2) stays
    // representable far beyond where erfc alone underflows
    const double z = -x * kInvSqrt2;
    return std::log(0.5 * std::erfc(z) * std::exp(z * z)) - z * z;
  }
  // asymptotic expansion Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - ...)
  const double x2 = x * x;
  const double series =
      1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - 0.5 * std::log(2.0 * M_PI) - std::log(-x) +
         std::log(series);
}

double log1mexp(double a) {
  if (a > 0.0) throw std::domain_error("log1mexp requires a nonpositive argument");
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return a > -kLn2 ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}

double log1pexp(double a) {
  if (a > 33.3) return a;
  if (a > -37.0) return std::log1p(std::exp(a));
  return std::exp(a);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit requires p in (0,1)");
  return std::log(p) - std::log1p(-p);
}

double expit(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double lchoose(double n, double k) {
  if (k < 0.0 || n < k) throw std::domain_error("lchoose requires 0 <= k <= n");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace fhtreg
