#include "fhtreg/longitudinal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fhtreg/fht.hpp"
#include "fhtreg/special.hpp"

namespace fhtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double to_running(const TimeTransform& transform, double t) {
  return transform ? transform(t) : t;
}

// survival log-probability that treats the interval start r = 0 as certain
// survival
double log_survival_from(double r, const IgParams& p) {
  return r == 0.0 ? 0.0 : ig_log_survival(r, p);
}

}  // namespace

void SubjectRecord::validate() const {
  if (obs.empty()) throw std::invalid_argument("record " + id + " has no observations");
  if (obs.front().time != 0.0) {
    throw std::invalid_argument("record " + id + " must start at time 0");
  }
  const std::size_t m = obs.size() - 1;
  bool any_reading = false;
  bool all_readings = true;
  Eigen::Index z_len = -1;
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const auto& o = obs[j];
    if (j > 0 && o.time < obs[j - 1].time) {
      throw std::invalid_argument("record " + id + ": times decrease at visit " +
                                  std::to_string(j));
    }
    if (o.failed && j < m) {
      throw std::invalid_argument("record " + id + ": failure recorded before the last visit (visit " +
                                  std::to_string(j) + ")");
    }
    const bool alive = !o.failed;
    if (alive) {
      if (o.z.size() == 0) {
        throw std::invalid_argument("record " + id + ": covariates missing at living visit " +
                                    std::to_string(j));
      }
      if (z_len < 0) z_len = o.z.size();
      if (o.z.size() != z_len) {
        throw std::invalid_argument("record " + id + ": covariate row length varies");
      }
      if (o.reading) {
        any_reading = true;
        if (!(*o.reading > 0.0)) {
          throw std::invalid_argument("record " + id + ": process reading must be positive while alive (visit " +
                                      std::to_string(j) + ")");
        }
      } else {
        all_readings = false;
      }
    } else {
      if (o.z.size() != 0) {
        throw std::invalid_argument("record " + id + ": covariates are not defined on the failure row");
      }
      if (obs.size() < 2) {
        throw std::invalid_argument("record " + id + ": failure at entry time");
      }
    }
  }
  if (any_reading && !all_readings) {
    throw std::invalid_argument("record " + id +
                                ": process readings must be present at every living visit or at none");
  }
}

bool SubjectRecord::observed_mode() const {
  for (const auto& o : obs) {
    if (!o.failed) return o.reading.has_value();
  }
  return false;
}

double composite_marker(const Eigen::VectorXd& values,
                        const CompositeMarkerSpec& spec) {
  if (spec.gammas.size() < 1) throw std::invalid_argument("at least one marker weight required");
  if (values.size() != spec.gammas.size()) {
    throw std::invalid_argument("marker reading count " + std::to_string(values.size()) +
                                " does not match weight count " +
                                std::to_string(spec.gammas.size()));
  }
  return spec.gamma0 + spec.gammas.dot(values);
}

void MarkerModelSpec::validate() const {
  parent.validate();
  const Eigen::Index k = marker_drift.size();
  if (k < 1) throw std::invalid_argument("at least one marker required");
  if (marker_cov.rows() != k || marker_cov.cols() != k || cross_cov.size() != k) {
    throw std::invalid_argument("marker covariance blocks have inconsistent sizes");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(joint_cov());
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("joint parent-marker covariance is not positive definite");
  }
}

Eigen::MatrixXd MarkerModelSpec::joint_cov() const {
  const Eigen::Index k = marker_drift.size();
  Eigen::MatrixXd joint(k + 1, k + 1);
  joint(0, 0) = parent.sigma2;
  joint.block(0, 1, 1, k) = cross_cov.transpose();
  joint.block(1, 0, k, 1) = cross_cov;
  joint.block(1, 1, k, k) = 0.5 * (marker_cov + marker_cov.transpose());
  return joint;
}

void BivariateWienerSpec::validate() const {
  parent.validate();
  if (!(marker_sigma2 > 0.0)) throw std::invalid_argument("marker variance must be positive");
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::invalid_argument("parent-marker correlation must lie in (-1,1)");
  }
}

MarkerModelSpec BivariateWienerSpec::joint() const {
  validate();
  MarkerModelSpec spec;
  spec.parent = parent;
  spec.marker_drift = Eigen::VectorXd::Constant(1, marker_drift);
  spec.marker_cov = Eigen::MatrixXd::Constant(1, 1, marker_sigma2);
  spec.cross_cov =
      Eigen::VectorXd::Constant(1, rho * std::sqrt(parent.sigma2 * marker_sigma2));
  return spec;
}

ConditionalMoments conditional_parent_given_markers(
    const MarkerModelSpec& spec, const Eigen::VectorXd& marker_increments,
    double dr) {
  spec.validate();
  if (!(dr > 0.0)) throw std::invalid_argument("running-time interval must be positive");
  if (marker_increments.size() != spec.marker_drift.size()) {
    throw std::invalid_argument("marker increment count does not match the model");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(spec.marker_cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("marker covariance is singular");
  }
  // Gaussian conditioning of the parent increment on the marker increments
  // over the same interval; the regression weights are per unit running
  // time, so dr cancels out of them
  const Eigen::VectorXd weights = llt.solve(spec.cross_cov);
  const Eigen::VectorXd centered = marker_increments - spec.marker_drift * dr;
  ConditionalMoments out;
  out.mean = spec.parent.mu * dr + weights.dot(centered);
  out.variance = (spec.parent.sigma2 - weights.dot(spec.cross_cov)) * dr;
  return out;
}

double absorbed_transition_logdensity(double x_prev, double x_next, double dr,
                                      double mu, double sigma2) {
  if (!(x_prev > 0.0) || !(x_next > 0.0)) {
    throw std::invalid_argument("absorbed transition requires both states above the boundary");
  }
  if (!(dr > 0.0)) throw std::invalid_argument("running-time interval must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("variance must be positive");
  const double var = sigma2 * dr;
  const double dev = x_next - x_prev - mu * dr;
  const double gauss = -0.5 * (kLog2Pi + std::log(var)) - dev * dev / (2.0 * var);
  return gauss + log1mexp(-2.0 * x_prev * x_next / var);
}

double uncoupled_loglik(const SubjectRecord& record, const RegressionSpec& spec,
                        const TimeTransform& transform,
                        const UncoupledOptions& options) {
  record.validate();
  spec.validate();
  if (spec.cure) {
    throw std::invalid_argument("cure mixtures are not supported in the longitudinal factorization");
  }
  if (spec.alpha) {
    throw std::invalid_argument(
        "exposure weights enter longitudinal records through the time transform");
  }
  const bool observed = record.observed_mode();
  const std::size_t m = record.obs.size() - 1;
  double total = 0.0;
  double r_prev = to_running(transform, record.obs[0].time);
  for (std::size_t j = 1; j <= m; ++j) {
    const auto& left = record.obs[j - 1];
    const auto& right = record.obs[j];
    const double r_j = to_running(transform, right.time);
    const double dr = r_j - r_prev;
    if (dr < 0.0) {
      throw std::invalid_argument("record " + record.id + ": running time decreases at visit " +
                                  std::to_string(j));
    }
    // interval parameters come from the covariate row at the left end
    const LinkedParams params = apply_links(spec, left.z);
    if (right.failed) {
      const bool degenerate =
          dr == 0.0 && !(!observed && options.failure_term == FailureTerm::exact_time);
      if (degenerate) {
        // the exact-time form stays well defined at dr = 0 (it reduces to
        // the hazard); the interval forms do not
        if (options.warnings) {
          options.warnings->push_back("record " + record.id + ": degenerate interval at visit " +
                                      std::to_string(j) + " contributes nothing");
        }
      } else if (observed) {
        // probability that the hit fell inside this interval, from the
        // last recorded level
        const IgParams from_reading{params.mu, 1.0, *left.reading};
        total += std::log(ig_cdf(dr, from_reading));
      } else {
        const IgParams ig{params.mu, 1.0, params.x0};
        if (options.failure_term == FailureTerm::exact_time) {
          if (!(r_j > 0.0)) {
            throw std::invalid_argument("record " + record.id + ": failure at running time 0");
          }
          total += ig_log_pdf(r_j, ig) - log_survival_from(r_prev, ig);
        } else {
          // conditional interval-absorption probability
          // (F(r_j) - F(r_prev)) / (1 - F(r_prev)) via survival logs
          const double ls_prev = log_survival_from(r_prev, ig);
          const double ls_j = log_survival_from(r_j, ig);
          total += ls_prev == -kInf ? -kInf
                                    : log1mexp(std::min(ls_j - ls_prev, 0.0));
        }
      }
    } else if (observed) {
      if (dr == 0.0) {
        if (options.warnings) {
          options.warnings->push_back("record " + record.id + ": degenerate interval at visit " +
                                      std::to_string(j) + " contributes nothing");
        }
      } else {
        total += absorbed_transition_logdensity(*left.reading, *right.reading, dr,
                                                params.mu, 1.0);
      }
    } else {
      if (dr == 0.0) {
        if (options.warnings) {
          options.warnings->push_back("record " + record.id + ": degenerate interval at visit " +
                                      std::to_string(j) + " contributes nothing");
        }
      } else {
        const IgParams ig{params.mu, 1.0, params.x0};
        total += log_survival_from(r_j, ig) - log_survival_from(r_prev, ig);
      }
    }
    r_prev = r_j;
  }
  return total;
}

FitResult fit_uncoupled(const std::vector<SubjectRecord>& records,
                        const ModelShape& shape, const FitOptions& options,
                        const TimeTransform& transform) {
  if (records.empty()) throw std::invalid_argument("no records to fit");
  for (const auto& rec : records) {
    rec.validate();
    if (rec.observed_mode()) {
      throw std::invalid_argument(
          "record " + rec.id +
          ": fitting over observed-process records is not supported; evaluate "
          "the factored likelihood directly");
    }
  }
  if (shape.cure || shape.n_exposure > 0) {
    throw std::invalid_argument(
        "the longitudinal fit supports plain drift/level models only");
  }
  // moment start on the terminal times, as in the censored-survival fit
  double time_sum = 0.0;
  long n_failed = 0;
  for (const auto& rec : records) {
    if (rec.obs.back().failed) {
      time_sum += rec.obs.back().time;
      ++n_failed;
    }
  }
  if (n_failed == 0) {
    for (const auto& rec : records) time_sum += rec.obs.back().time;
    n_failed = static_cast<long>(records.size());
  }
  const double mean_time = time_sum / static_cast<double>(n_failed);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(shape.dim());
  start(0) = -1.0 / std::min(std::max(mean_time, 1e-2), 1e4);

  Objective objective = [&](const Eigen::VectorXd& theta) -> double {
    try {
      const RegressionSpec spec = shape.unpack(theta);
      double total = 0.0;
      for (const auto& rec : records) total += uncoupled_loglik(rec, spec, transform);
      return total;
    } catch (const std::exception&) {
      return -kInf;
    }
  };

  OptimResult opt = maximize(objective, start, options.optim);
  FitResult result;
  result.shape = shape;
  result.theta = opt.theta;
  result.spec = shape.unpack(opt.theta);
  result.loglik = opt.value;
  result.converged = opt.converged;
  result.iterations = opt.iterations;
  result.trace = opt.trace;
  if (!opt.converged) {
    result.warnings.push_back("optimizer did not meet the convergence tolerances");
  }
  const Eigen::MatrixXd hess = numeric_hessian(objective, opt.theta);
  Eigen::MatrixXd info = -0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
  const Eigen::VectorXd evals = eig.eigenvalues();
  if (evals.minCoeff() <= 1e-8 * std::max(1.0, evals.cwiseAbs().maxCoeff())) {
    result.singular_information = true;
    result.stderr_theta = Eigen::VectorXd::Constant(
        shape.dim(), std::numeric_limits<double>::quiet_NaN());
    result.warnings.push_back("observed information is singular to working precision");
  } else {
    result.covariance = eig.eigenvectors() * evals.cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
    result.covariance = 0.5 * (result.covariance + result.covariance.transpose());
    result.stderr_theta = result.covariance.diagonal().cwiseSqrt();
  }
  return result;
}

std::optional<double> lagged_residual_correlation(
    const std::vector<SubjectRecord>& records, const RegressionSpec& spec,
    const TimeTransform& transform) {
  double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
  long n_pairs = 0;
  for (const auto& rec : records) {
    rec.validate();
    if (!rec.observed_mode()) continue;
    std::vector<double> residuals;
    double r_prev = to_running(transform, rec.obs[0].time);
    for (std::size_t j = 1; j < rec.obs.size(); ++j) {
      if (rec.obs[j].failed) break;
      const double r_j = to_running(transform, rec.obs[j].time);
      const double dr = r_j - r_prev;
      if (dr > 0.0) {
        const LinkedParams params = apply_links(spec, rec.obs[j - 1].z);
        residuals.push_back(
            (*rec.obs[j].reading - *rec.obs[j - 1].reading - params.mu * dr) /
            std::sqrt(dr));
      }
      r_prev = r_j;
    }
    for (std::size_t j = 1; j < residuals.size(); ++j) {
      const double a = residuals[j - 1];
      const double b = residuals[j];
      sum_a += a;
      sum_b += b;
      sum_aa += a * a;
      sum_bb += b * b;
      sum_ab += a * b;
      ++n_pairs;
    }
  }
  if (n_pairs < 2) return std::nullopt;
  const double n = static_cast<double>(n_pairs);
  const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
  const double var_a = sum_aa / n - (sum_a / n) * (sum_a / n);
  const double var_b = sum_bb / n - (sum_b / n) * (sum_b / n);
  if (!(var_a > 0.0) || !(var_b > 0.0)) return std::nullopt;
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace fhtreg
