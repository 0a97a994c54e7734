#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fhtreg/process.hpp"
#include "fhtreg/regression.hpp"

namespace fhtreg {

/// One follow-up visit: time since entry, failure code, an optional
/// reading of the underlying process, and the covariate row (empty on a
/// failure row, where covariates are no longer defined).
struct Observation {
  double time = 0.0;
  bool failed = false;
  std::optional<double> reading;
  Eigen::VectorXd z;
};

/// A subject's longitudinal history: visits at nondecreasing times starting
/// at 0, failure possible only at the last visit. Records either carry a
/// process reading at every living visit (observed-process mode) or at
/// none (latent mode).
struct SubjectRecord {
  std::string id;
  std::vector<Observation> obs;

  void validate() const;
  bool observed_mode() const;
};

/// Additive composite of several marker readings taken at a common time.
struct CompositeMarkerSpec {
  double gamma0 = 0.0;
  Eigen::VectorXd gammas;
};

double composite_marker(const Eigen::VectorXd& values,
                        const CompositeMarkerSpec& spec);

/// Joint law of the parent process and K markers: all coordinates are
/// Wiener with the given drifts and the per-unit-running-time covariance
/// assembled from the blocks below.
struct MarkerModelSpec {
  WienerSpec parent;
  Eigen::VectorXd marker_drift;
  Eigen::MatrixXd marker_cov;  // K x K per unit running time
  Eigen::VectorXd cross_cov;   // cov(parent, marker_k) per unit running time

  void validate() const;
  Eigen::MatrixXd joint_cov() const;  // (K+1) x (K+1), parent first
};

/// Two-coordinate special case parameterized by a correlation.
struct BivariateWienerSpec {
  WienerSpec parent;
  double marker_drift = 0.0;
  double marker_sigma2 = 1.0;
  double rho = 0.0;

  void validate() const;
  MarkerModelSpec joint() const;
};

struct ConditionalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian conditional moments of the parent increment over a
/// running-time interval given the marker increments over the same
/// interval.
ConditionalMoments conditional_parent_given_markers(
    const MarkerModelSpec& spec, const Eigen::VectorXd& marker_increments,
    double dr);

/// log sub-density of the process reading x_next given reading x_prev an
/// interval dr earlier and no boundary hit in between: the Gaussian
/// transition thinned by the bridge crossing probability,
/// N(x_next; x_prev + mu dr, sigma2 dr) * (1 - exp(-2 x_prev x_next / (sigma2 dr))).
/// Integrating over x_next > 0 recovers P(no hit in dr | x_prev).
double absorbed_transition_logdensity(double x_prev, double x_next, double dr,
                                      double mu, double sigma2);

/// Calendar-to-running-time map used for longitudinal records; empty means
/// identity.
using TimeTransform = std::function<double(double)>;

/// Convention for the terminal failure term of a latent-mode record: the
/// exact-time form conditions the hitting density on prior survival (and
/// makes a single-visit record match the plain censored-survival
/// contribution exactly); the interval form uses only the fact that the
/// hit fell inside the last interval.
enum class FailureTerm { exact_time, interval };

struct UncoupledOptions {
  FailureTerm failure_term = FailureTerm::exact_time;
  std::vector<std::string>* warnings = nullptr;
};

/// Longitudinal log-likelihood factored visit by visit under the Markov
/// assumption. Latent mode multiplies conditional survival ratios (and the
/// terminal failure term); observed-process mode multiplies absorbed
/// transition densities, with the terminal failure contributing the
/// interval absorption probability from the last reading. Interval
/// parameters come from the covariate row at the interval's left end.
double uncoupled_loglik(const SubjectRecord& record, const RegressionSpec& spec,
                        const TimeTransform& transform = {},
                        const UncoupledOptions& options = {});

/// Maximum-likelihood fit over latent-mode records via the uncoupled
/// factorization; with time-constant covariates this lands on the same
/// optimum as the plain censored-survival fit, because the factored
/// likelihood telescopes to it.
FitResult fit_uncoupled(const std::vector<SubjectRecord>& records,
                        const ModelShape& shape, const FitOptions& options = {},
                        const TimeTransform& transform = {});

/// Markov-assumption diagnostic: correlation between successive
/// standardized transition residuals pooled across observed-process
/// records. Reported for inspection only, never enforced; absent when
/// fewer than two residual pairs exist.
std::optional<double> lagged_residual_correlation(
    const std::vector<SubjectRecord>& records, const RegressionSpec& spec,
    const TimeTransform& transform = {});

}  // namespace fhtreg
