#include "fhtreg/fht.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fhtreg/special.hpp"

namespace fhtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}  // namespace

void IgParams::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("hitting-time law requires sigma2 > 0");
  if (!(x0 > 0.0)) throw std::invalid_argument("hitting-time law requires x0 > 0");
  if (!std::isfinite(mu)) throw std::invalid_argument("hitting-time law requires finite mu");
}

double ig_log_pdf(double r, const IgParams& p) {
  p.validate();
  if (!(r > 0.0)) throw std::invalid_argument("running time must be positive");
  const double dev = p.x0 + p.mu * r;
  return std::log(p.x0) - 0.5 * (kLog2Pi + std::log(p.sigma2) + 3.0 * std::log(r)) -
         dev * dev / (2.0 * p.sigma2 * r);
}

double ig_pdf(double r, const IgParams& p) { return std::exp(ig_log_pdf(r, p)); }

double ig_cdf(double r, const IgParams& p) {
  p.validate();
  if (!(r > 0.0)) throw std::invalid_argument("running time must be positive");
  const double s = std::sqrt(p.sigma2 * r);
  const double a = norm_cdf(-(p.mu * r + p.x0) / s);
  // the second term multiplies a potentially enormous exponential by a tiny
  // normal tail; combining them in log space keeps the product finite
  const double w = -2.0 * p.x0 * p.mu / p.sigma2;
  const double b = std::exp(w + log_norm_cdf((p.mu * r - p.x0) / s));
  return a + b;
}

double ig_log_survival(double r, const IgParams& p) {
  p.validate();
  if (!(r > 0.0)) throw std::invalid_argument("running time must be positive");
  // survival = Phi((mu r + x0)/s) - e^w Phi((mu r - x0)/s); both pieces kept
  // in log form so the difference of near-equal tails is taken via log1mexp
  const double s = std::sqrt(p.sigma2 * r);
  const double la = log_norm_cdf((p.mu * r + p.x0) / s);
  const double lb = -2.0 * p.x0 * p.mu / p.sigma2 + log_norm_cdf((p.mu * r - p.x0) / s);
  const double d = lb - la;
  if (d >= 0.0) return -kInf;  // survival mass below representable precision
  return la + log1mexp(d);
}

double ig_survival(double r, const IgParams& p) {
  return std::exp(ig_log_survival(r, p));
}

double prob_finite_fht(const IgParams& p) {
  p.validate();
  if (p.mu <= 0.0) return 1.0;
  return std::exp(-2.0 * p.x0 * p.mu / p.sigma2);
}

std::optional<double> ig_sample(const IgParams& p, RngStream& rng) {
  p.validate();
  if (p.mu > 0.0) {
    if (rng.uniform() >= prob_finite_fht(p)) return std::nullopt;
    // conditional on being finite, the hitting time follows the law with
    // the drift sign flipped
    return ig_sample(IgParams{-p.mu, p.sigma2, p.x0}, rng);
  }
  if (p.mu == 0.0) {
    // driftless crossing time: x0^2 / (sigma^2 Z^2)
    double z;
    do {
      z = rng.normal();
    } while (z == 0.0);
    return p.x0 * p.x0 / (p.sigma2 * z * z);
  }
  // proper inverse Gaussian with mean x0/|mu| and shape x0^2/sigma2
  const double mean = p.x0 / -p.mu;
  const double shape = p.x0 * p.x0 / p.sigma2;
  const double z = rng.normal();
  const double nu = z * z;
  const double cand = mean + mean * mean * nu / (2.0 * shape) -
                      mean / (2.0 * shape) *
                          std::sqrt(4.0 * mean * shape * nu + mean * mean * nu * nu);
  if (rng.uniform() <= mean / (mean + cand)) return cand;
  return mean * mean / cand;
}

double negbin_fht_pmf(long s, const BernoulliSpec& spec) {
  spec.validate();
  if (s < spec.m) throw std::invalid_argument("trial count must be at least the required success count");
  const double sd = static_cast<double>(s);
  const double md = static_cast<double>(spec.m);
  return std::exp(lchoose(sd - 1.0, md - 1.0) + md * std::log(spec.p) +
                  (sd - md) * std::log1p(-spec.p));
}

double erlang_fht_pdf(double t, const PoissonSpec& spec) {
  spec.validate();
  if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
  const double md = static_cast<double>(spec.m);
  return std::exp(md * std::log(spec.lambda) + (md - 1.0) * std::log(t) -
                  spec.lambda * t - std::lgamma(md));
}

double erlang_fht_cdf(double t, const PoissonSpec& spec) {
  spec.validate();
  if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
  return boost::math::gamma_p(static_cast<double>(spec.m), spec.lambda * t);
}

double gamma_fht_survival(double t, const GammaSpec& spec) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  if (t == 0.0) return 1.0;
  // survival of a susceptible subject is P(Z(t) < x0) with
  // Z(t) ~ Gamma(alpha t, beta)
  const double susceptible_survival =
      boost::math::gamma_p(spec.alpha * t, spec.x0 / spec.beta);
  return (1.0 - spec.p_susceptible) + spec.p_susceptible * susceptible_survival;
}

DiscreteFhtPmf markov_fht_pmf(const MarkovChainSpec& spec, long k_max) {
  spec.validate();
  if (k_max < 1) throw std::invalid_argument("horizon must be at least 1");
  const auto n = spec.transition.rows();
  std::vector<Eigen::Index> interior;
  interior.reserve(static_cast<std::size_t>(n));
  Eigen::Index x0_pos = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!spec.is_boundary(static_cast<int>(i))) {
      if (i == spec.x0) x0_pos = static_cast<Eigen::Index>(interior.size());
      interior.push_back(i);
    }
  }
  const auto m = static_cast<Eigen::Index>(interior.size());
  // transition sub-matrix over non-boundary states and the per-state
  // one-step absorption mass
  Eigen::MatrixXd q(m, m);
  Eigen::VectorXd absorb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double into_boundary = 0.0;
    for (int b : spec.boundary) into_boundary += spec.transition(interior[i], b);
    absorb(i) = into_boundary;
    for (Eigen::Index j = 0; j < m; ++j) {
      q(i, j) = spec.transition(interior[i], interior[j]);
    }
  }
  Eigen::RowVectorXd occupancy = Eigen::RowVectorXd::Zero(m);
  occupancy(x0_pos) = 1.0;
  DiscreteFhtPmf pmf;
  pmf.support_offset = 1;
  pmf.probabilities.resize(static_cast<std::size_t>(k_max));
  for (long k = 0; k < k_max; ++k) {
    pmf.probabilities[static_cast<std::size_t>(k)] = occupancy * absorb;
    occupancy = occupancy * q;
  }
  pmf.deficiency = occupancy.sum();
  return pmf;
}

}  // namespace fhtreg
