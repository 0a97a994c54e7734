#pragma once

namespace fhtreg {

// standard normal density / distribution
double norm_pdf(double x);
double norm_cdf(double x);

/// log(Phi(x)), accurate into the deep left tail (x ~ -300) where
/// norm_cdf itself underflows.
double log_norm_cdf(double x);

/// log(1 - exp(a)) for a <= 0; the two-branch form of Maechler keeps
/// full precision for a near 0 and near -inf.
double log1mexp(double a);

/// log(1 + exp(a)) without overflow for large a.
double log1pexp(double a);

double logit(double p);
double expit(double x);

// log binomial coefficient log C(n, k) for real n >= k >= 0 arguments
double lchoose(double n, double k);

}  // namespace fhtreg
