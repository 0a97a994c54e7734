#pragma once

#include <optional>
#include <vector>

#include "fhtreg/process.hpp"
#include "fhtreg/rng.hpp"

namespace fhtreg {

/// Parameters of the first-hitting-time law of a Wiener process started at
/// x0 > 0 with the boundary at zero: an inverse Gaussian distribution,
/// improper (total mass < 1) when the drift points away from the boundary.
struct IgParams {
  double mu = 0.0;
  double sigma2 = 1.0;
  double x0 = 1.0;

  void validate() const;
};

double ig_log_pdf(double r, const IgParams& p);
double ig_pdf(double r, const IgParams& p);
double ig_cdf(double r, const IgParams& p);

/// log P(hitting time > r); -inf when the survival probability underflows.
double ig_log_survival(double r, const IgParams& p);
double ig_survival(double r, const IgParams& p);

/// P(hitting time < infinity): 1 for mu <= 0, exp(-2 x0 mu / sigma2) for
/// mu > 0.
double prob_finite_fht(const IgParams& p);

/// Exact draw from the hitting-time law; absent means the path never hits.
/// Finite draws use the Michael-Schucany-Haas construction; positive drift
/// first decides finiteness, then samples the conditional law via the
/// drift-reversal identity F(r | mu) = prob_finite * F(r | -mu).
std::optional<double> ig_sample(const IgParams& p, RngStream& rng);

/// Discrete hitting-time law on {offset, offset+1, ...} with the mass that
/// never arrives recorded separately.
struct DiscreteFhtPmf {
  long support_offset = 1;
  std::vector<double> probabilities;
  double deficiency = 0.0;
};

/// P(trial of m-th success = s) for i.i.d. Bernoulli(p) trials.
double negbin_fht_pmf(long s, const BernoulliSpec& spec);

/// Time of the m-th event of a Poisson process: gamma(m, lambda).
double erlang_fht_pdf(double t, const PoissonSpec& spec);
double erlang_fht_cdf(double t, const PoissonSpec& spec);

/// P(hitting time > t) for a gamma degradation process started at x0 with
/// boundary zero, mixed with a non-susceptible fraction:
/// (1 - p) + p * P(Z(t) < x0).
double gamma_fht_survival(double t, const GammaSpec& spec);

/// P(absorption at step k), k = 1..k_max, by iterating the transition
/// matrix restricted to non-boundary states; deficiency is the mass still
/// unabsorbed at the horizon.
DiscreteFhtPmf markov_fht_pmf(const MarkovChainSpec& spec, long k_max);

}  // namespace fhtreg
