#include "fhtreg/regression.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "fhtreg/fht.hpp"
#include "fhtreg/rng.hpp"
#include "fhtreg/special.hpp"

namespace fhtreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// log-survival clamp for censored subjects whose survival probability
// underflows; finite so line searches can still compare candidate points
constexpr double kUnderflowLogLik = -745.0;

double logsumexp2(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

double LinkFunction::to_parameter(double eta) const {
  switch (kind) {
    case LinkKind::identity:
      return eta;
    case LinkKind::log:
      return std::exp(eta);
    case LinkKind::logit:
      return expit(eta);
    case LinkKind::fisher_z:
      return std::tanh(eta);
  }
  throw std::logic_error("unknown link kind");
}

double LinkFunction::to_linear(double value) const {
  switch (kind) {
    case LinkKind::identity:
      return value;
    case LinkKind::log:
      if (!(value > 0.0)) throw std::domain_error("log link requires a positive parameter");
      return std::log(value);
    case LinkKind::logit:
      return logit(value);
    case LinkKind::fisher_z:
      if (!(value > -1.0 && value < 1.0)) {
        throw std::domain_error("correlation transform requires a value in (-1,1)");
      }
      return std::atanh(value);
  }
  throw std::logic_error("unknown link kind");
}

void RegressionSpec::validate() const {
  if (beta.size() < 1) throw std::invalid_argument("drift coefficients missing");
  if (gamma.size() != beta.size()) {
    throw std::invalid_argument("drift and level coefficient lengths differ");
  }
  if (cure && cure->size() != beta.size()) {
    throw std::invalid_argument("susceptibility coefficient length differs from drift's");
  }
  if (alpha) {
    if (alpha->size() < 1) throw std::invalid_argument("exposure weights missing");
    for (Eigen::Index j = 0; j < alpha->size(); ++j) {
      if (!(((*alpha)(j)) > 0.0)) {
        throw std::invalid_argument("exposure weights must be positive");
      }
    }
    if ((*alpha)(alpha->size() - 1) != 1.0) {
      throw std::invalid_argument("the last exposure weight is the numeraire and must equal 1");
    }
  }
}

LinkedParams apply_links(const RegressionSpec& spec, const Eigen::VectorXd& z) {
  if (z.size() != spec.beta.size()) {
    throw std::invalid_argument("covariate row length " + std::to_string(z.size()) +
                                " does not match coefficient length " +
                                std::to_string(spec.beta.size()));
  }
  LinkedParams out;
  out.mu = spec.beta.dot(z);
  out.x0 = std::exp(spec.gamma.dot(z));
  if (spec.cure) out.p_susceptible = expit(spec.cure->dot(z));
  return out;
}

double SurvivalRow::running_time(const RegressionSpec& spec) const {
  if (!spec.alpha) return time;
  if (occupancy.size() != spec.alpha->size()) {
    throw std::invalid_argument("exposure occupancy length does not match weight count");
  }
  return occupancy.dot(*spec.alpha);
}

int RegressionData::n_covariates() const {
  if (rows.empty()) throw std::invalid_argument("empty dataset");
  return static_cast<int>(rows.front().z.size()) - 1;
}

int RegressionData::n_events() const {
  int events = 0;
  for (const auto& row : rows) events += row.failed ? 1 : 0;
  return events;
}

double subject_loglik(double r, bool failed, double mu, double x0, bool* underflow) {
  const IgParams p{mu, 1.0, x0};
  if (failed) return ig_log_pdf(r, p);
  // the log-survival is computed stably, so instead of hitting -inf it can
  // legitimately fall below the point where the probability itself
  // underflows; everything past the clamp is treated as "impossibly deep"
  const double ls = ig_log_survival(r, p);
  if (ls < kUnderflowLogLik) {
    if (underflow) *underflow = true;
    return kUnderflowLogLik;
  }
  return ls;
}

LoglikDetail sample_loglik_detail(const RegressionData& data,
                                  const RegressionSpec& spec) {
  spec.validate();
  LoglikDetail out;
  for (const auto& row : data.rows) {
    try {
      const LinkedParams params = apply_links(spec, row.z);
      const double r = row.running_time(spec);
      if (!(r > 0.0)) throw std::invalid_argument("nonpositive running time");
      if (!spec.cure) {
        bool under = false;
        out.value += subject_loglik(r, row.failed, params.mu, params.x0, &under);
        out.underflow_count += under ? 1 : 0;
        continue;
      }
      // cure mixture: density p f, survival (1 - p) + p (1 - F); the
      // susceptibility logs come via log1pexp so extreme logits stay exact
      const double eta = spec.cure->dot(row.z);
      const double log_p = -log1pexp(-eta);
      const double log_not_p = -log1pexp(eta);
      const IgParams ig{params.mu, 1.0, params.x0};
      if (row.failed) {
        out.value += log_p + ig_log_pdf(r, ig);
      } else {
        const double term = logsumexp2(log_not_p, log_p + ig_log_survival(r, ig));
        if (term < kUnderflowLogLik) {
          out.value += kUnderflowLogLik;
          ++out.underflow_count;
        } else {
          out.value += term;
        }
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("subject " + (row.id.empty() ? "?" : row.id) +
                                  ": " + e.what());
    }
  }
  return out;
}

double sample_loglik(const RegressionData& data, const RegressionSpec& spec) {
  return sample_loglik_detail(data, spec).value;
}

int ModelShape::dim() const {
  const int per_block = n_covariates + 1;
  return 2 * per_block + (cure ? per_block : 0) + std::max(0, n_exposure - 1);
}

Eigen::VectorXd ModelShape::pack(const RegressionSpec& spec) const {
  const int per_block = n_covariates + 1;
  Eigen::VectorXd theta(dim());
  theta.segment(0, per_block) = spec.beta;
  theta.segment(per_block, per_block) = spec.gamma;
  int at = 2 * per_block;
  if (cure) {
    theta.segment(at, per_block) = *spec.cure;
    at += per_block;
  }
  for (int j = 0; j + 1 < n_exposure; ++j) {
    theta(at++) = std::log((*spec.alpha)(j));
  }
  return theta;
}

RegressionSpec ModelShape::unpack(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim()) {
    throw std::invalid_argument("parameter vector length does not match the model shape");
  }
  const int per_block = n_covariates + 1;
  RegressionSpec spec;
  spec.beta = theta.segment(0, per_block);
  spec.gamma = theta.segment(per_block, per_block);
  int at = 2 * per_block;
  if (cure) {
    spec.cure = theta.segment(at, per_block);
    at += per_block;
  }
  if (n_exposure > 0) {
    Eigen::VectorXd alpha(n_exposure);
    for (int j = 0; j + 1 < n_exposure; ++j) alpha(j) = std::exp(theta(at++));
    alpha(n_exposure - 1) = 1.0;
    spec.alpha = alpha;
  }
  return spec;
}

std::vector<std::string> ModelShape::parameter_names() const {
  std::vector<std::string> names;
  for (int i = 0; i <= n_covariates; ++i) names.push_back("beta_" + std::to_string(i));
  for (int i = 0; i <= n_covariates; ++i) names.push_back("gamma_" + std::to_string(i));
  if (cure) {
    for (int i = 0; i <= n_covariates; ++i) names.push_back("cure_" + std::to_string(i));
  }
  for (int j = 1; j < n_exposure; ++j) names.push_back("log_alpha_" + std::to_string(j));
  return names;
}

namespace {

Eigen::VectorXd moment_start(const RegressionData& data, const ModelShape& shape) {
  double time_sum = 0.0;
  long time_count = 0;
  for (const auto& row : data.rows) {
    if (row.failed) {
      time_sum += row.time;
      ++time_count;
    }
  }
  if (time_count == 0) {
    for (const auto& row : data.rows) time_sum += row.time;
    time_count = static_cast<long>(data.rows.size());
  }
  const double mean_time = time_sum / static_cast<double>(time_count);
  // with x0 = 1 the mean hitting time is 1/|mu|; start the drift there
  const double mu0 = -1.0 / std::min(std::max(mean_time, 1e-2), 1e4);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(shape.dim());
  theta(0) = mu0;
  return theta;
}

}  // namespace

FitResult fit(const RegressionData& data, const ModelShape& shape,
              const FitOptions& options) {
  if (data.rows.empty()) throw std::invalid_argument("empty dataset");
  const int k = data.n_covariates();
  if (k != shape.n_covariates) {
    throw std::invalid_argument("dataset has " + std::to_string(k) +
                                " covariates but the model expects " +
                                std::to_string(shape.n_covariates));
  }
  for (const auto& row : data.rows) {
    if (static_cast<int>(row.z.size()) != k + 1) {
      throw std::invalid_argument("subject " + row.id + ": covariate row length varies");
    }
    if (static_cast<int>(row.occupancy.size()) != shape.n_exposure) {
      throw std::invalid_argument("subject " + row.id +
                                  ": exposure occupancy does not match the model");
    }
  }
  const int events = data.n_events();
  FitResult result;
  result.shape = shape;
  if (events == 0) {
    if (shape.cure) {
      throw std::invalid_argument(
          "no events in the data: the susceptibility fraction is not identified");
    }
    result.warnings.push_back(
        "all subjects are censored; estimates rest on censoring times alone");
  }

  Eigen::VectorXd base_start;
  if (options.start) {
    if (options.start->size() != shape.dim()) {
      throw std::invalid_argument("starting vector length does not match the model shape");
    }
    base_start = *options.start;
  } else {
    base_start = moment_start(data, shape);
  }
  // surface data problems (bad rows, mismatched lengths) before the
  // optimizer swallows them as mere non-finite objective values
  sample_loglik_detail(data, shape.unpack(base_start));

  Objective objective = [&](const Eigen::VectorXd& theta) -> double {
    try {
      return sample_loglik(data, shape.unpack(theta));
    } catch (const std::exception&) {
      // out-of-domain parameter excursions during line search
      return -kInf;
    }
  };

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(base_start);
  for (int s = 1; s < options.starts; ++s) {
    RngStream rng(options.start_seed, static_cast<std::uint64_t>(s));
    Eigen::VectorXd jitter(base_start.size());
    for (Eigen::Index i = 0; i < jitter.size(); ++i) jitter(i) = 0.25 * rng.normal();
    starts.push_back(base_start + jitter);
  }

  OptimResult opt = maximize_multistart(objective, starts, options.optim);
  result.theta = opt.theta;
  result.spec = shape.unpack(opt.theta);
  result.loglik = opt.value;
  result.converged = opt.converged;
  result.iterations = opt.iterations;
  result.trace = opt.trace;
  if (!opt.converged) {
    result.warnings.push_back("optimizer did not meet the convergence tolerances");
  }

  const LoglikDetail detail = sample_loglik_detail(data, result.spec);
  if (detail.underflow_count > 0) {
    result.warnings.push_back(
        std::to_string(detail.underflow_count) +
        " censored subject(s) had underflowing survival probability; their "
        "contributions were clamped at -745");
  }
  if (shape.cure) {
    const double sup = result.spec.cure->lpNorm<Eigen::Infinity>();
    if (sup > 30.0) {
      result.warnings.push_back(
          "susceptibility fraction pinned at a boundary (logit coefficient "
          "magnitude " +
          format_number(sup) + ")");
    }
  }

  // observed information from the finite-difference Hessian at the optimum
  const Eigen::MatrixXd hess = numeric_hessian(objective, opt.theta);
  Eigen::MatrixXd info = -0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
  const Eigen::VectorXd evals = eig.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  // the threshold must sit well above the finite-difference noise of the
  // Hessian (around 1e-7 of its scale) for exact collinearity to register
  if (evals.minCoeff() <= 1e-5 * scale) {
    result.singular_information = true;
    result.stderr_theta = Eigen::VectorXd::Constant(shape.dim(), kNan);
    result.warnings.push_back(
        "observed information is singular to working precision (smallest "
        "eigenvalue " +
        format_number(evals.minCoeff()) +
        "); covariates may be collinear or the model overparameterized");
  } else {
    result.covariance = eig.eigenvectors() *
                        evals.cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
    result.covariance = 0.5 * (result.covariance + result.covariance.transpose());
    result.stderr_theta = result.covariance.diagonal().cwiseSqrt();
  }
  return result;
}

FitResult fit(const RegressionData& data, const FitOptions& options) {
  ModelShape shape;
  shape.n_covariates = data.n_covariates();
  shape.cure = false;
  shape.n_exposure =
      data.rows.empty() ? 0 : static_cast<int>(data.rows.front().occupancy.size());
  return fit(data, shape, options);
}

FitResult fit_cure_mixture(const RegressionData& data, const FitOptions& options) {
  ModelShape shape;
  shape.n_covariates = data.n_covariates();
  shape.cure = true;
  shape.n_exposure =
      data.rows.empty() ? 0 : static_cast<int>(data.rows.front().occupancy.size());
  return fit(data, shape, options);
}

std::vector<double> predict_survival(const RegressionSpec& spec,
                                     const Eigen::VectorXd& z,
                                     const std::vector<double>& r_grid) {
  spec.validate();
  const LinkedParams params = apply_links(spec, z);
  const IgParams ig{params.mu, 1.0, params.x0};
  std::vector<double> survival;
  survival.reserve(r_grid.size());
  for (double r : r_grid) {
    if (r < 0.0) throw std::invalid_argument("running time must be nonnegative");
    const double s = r == 0.0 ? 1.0 : ig_survival(r, ig);
    survival.push_back((1.0 - params.p_susceptible) + params.p_susceptible * s);
  }
  return survival;
}

}  // namespace fhtreg
