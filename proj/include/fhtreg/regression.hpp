#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fhtreg/optim.hpp"

namespace fhtreg {

enum class LinkKind { identity, log, logit, fisher_z };

/// Bijection between a linear predictor and a constrained parameter.
struct LinkFunction {
  LinkKind kind = LinkKind::identity;

  double to_parameter(double eta) const;  // inverse link
  double to_linear(double value) const;   // forward link
};

/// Model structure and current coefficient values. The drift takes an
/// identity link (mu = z . beta) and the starting level a log link
/// (ln x0 = z . gamma); the process variance is pinned to 1, which fixes
/// the scale the (mu, x0) pair is otherwise only identified up to. An
/// optional susceptibility fraction enters through a logit link, and
/// optional exposure-category weights map calendar to running time (last
/// weight fixed to 1 as numeraire).
struct RegressionSpec {
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  std::optional<Eigen::VectorXd> cure;
  std::optional<Eigen::VectorXd> alpha;

  void validate() const;
};

struct LinkedParams {
  double mu = 0.0;
  double x0 = 1.0;
  double p_susceptible = 1.0;
};

/// Per-subject parameters from the covariate row z = (1, z_1..z_k).
LinkedParams apply_links(const RegressionSpec& spec, const Eigen::VectorXd& z);

/// One subject's observation for fitting: a running (or calendar) time, the
/// failure indicator, and the covariate row with leading intercept unit.
/// When exposure categories are modeled, occupancy holds the per-category
/// time r_j(t) accumulated by the observation time, so the running time is
/// alpha . occupancy.
struct SurvivalRow {
  std::string id;
  double time = 0.0;
  bool failed = false;
  Eigen::VectorXd z;
  Eigen::VectorXd occupancy;  // empty unless exposure categories are modeled

  double running_time(const RegressionSpec& spec) const;
};

struct RegressionData {
  std::vector<SurvivalRow> rows;

  int n_covariates() const;  // k, excluding the intercept
  int n_events() const;
};

/// Log-likelihood contribution of one subject at (mu, x0) with unit
/// variance: log density for a failure, log survival for a censored time.
/// A censored survival probability that underflows contributes the clamp
/// value -745 instead of -inf (keeps line searches finite) and reports the
/// underflow through the optional flag.
double subject_loglik(double r, bool failed, double mu, double x0,
                      bool* underflow = nullptr);

/// Sample log-likelihood: sum of subject contributions, with the cure
/// mixture applied when the spec carries one (density p f, survival
/// (1 - p) + p (1 - F)).
double sample_loglik(const RegressionData& data, const RegressionSpec& spec);

struct LoglikDetail {
  double value = 0.0;
  int underflow_count = 0;
};

LoglikDetail sample_loglik_detail(const RegressionData& data,
                                  const RegressionSpec& spec);

/// Free-parameter layout for packing a RegressionSpec into one optimizer
/// vector: beta, then gamma, then cure coefficients when enabled, then
/// log alpha_1..log alpha_{J-1} (the last weight is the fixed numeraire).
struct ModelShape {
  int n_covariates = 0;
  bool cure = false;
  int n_exposure = 0;  // categories J; 0 means calendar time

  int dim() const;
  Eigen::VectorXd pack(const RegressionSpec& spec) const;
  RegressionSpec unpack(const Eigen::VectorXd& theta) const;
  std::vector<std::string> parameter_names() const;
};

struct FitOptions {
  OptimOptions optim;
  int starts = 1;                // additional starts perturb the base start
  std::uint64_t start_seed = 0;  // seeds the perturbations
  std::optional<Eigen::VectorXd> start;  // replaces the moment-based start
};

struct FitResult {
  RegressionSpec spec;  // fitted coefficients
  ModelShape shape;
  double loglik = 0.0;
  Eigen::VectorXd theta;
  Eigen::VectorXd stderr_theta;  // NaN when the information matrix is singular
  Eigen::MatrixXd covariance;    // empty when singular
  bool converged = false;
  bool singular_information = false;
  int iterations = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> trace;
};

/// Maximum-likelihood fit by quasi-Newton ascent with numeric gradients;
/// standard errors come from the finite-difference observed information at
/// the optimum. An exactly collinear design surfaces as the
/// singular-information diagnostic rather than a crash.
FitResult fit(const RegressionData& data, const ModelShape& shape,
              const FitOptions& options = {});

/// Convenience wrappers for the two standard model structures.
FitResult fit(const RegressionData& data, const FitOptions& options = {});
FitResult fit_cure_mixture(const RegressionData& data,
                           const FitOptions& options = {});

/// Model-implied survival curve 1 - F (with cure mass when modeled) for a
/// covariate row over a running-time grid; r = 0 maps to survival 1.
std::vector<double> predict_survival(const RegressionSpec& spec,
                                     const Eigen::VectorXd& z,
                                     const std::vector<double>& r_grid);

}  // namespace fhtreg
