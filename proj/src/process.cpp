#include "fhtreg/process.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fhtreg/special.hpp"

namespace fhtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

long step_count(double dt, double t_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("horizon must be positive");
  return static_cast<long>(std::floor(t_max / dt + 1e-9));
}
}  // namespace

void WienerSpec::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("Wiener spec requires sigma2 > 0");
  if (!(x0 > 0.0)) throw std::invalid_argument("Wiener spec requires x0 > 0");
  if (!std::isfinite(mu)) throw std::invalid_argument("Wiener spec requires finite mu");
}

void GammaSpec::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(x0 > 0.0)) {
    throw std::invalid_argument("gamma spec requires alpha, beta, x0 > 0");
  }
  if (!(p_susceptible >= 0.0 && p_susceptible <= 1.0)) {
    throw std::invalid_argument("gamma spec requires p_susceptible in [0,1]");
  }
}

void PoissonSpec::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("Poisson spec requires lambda > 0");
  if (m < 1) throw std::invalid_argument("Poisson spec requires m >= 1");
}

void BernoulliSpec::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("Bernoulli spec requires p in (0,1)");
  if (m < 1) throw std::invalid_argument("Bernoulli spec requires m >= 1");
}

void OuSpec::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("OU spec requires theta > 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("OU spec requires sigma2 > 0");
}

void MarkovChainSpec::validate() const {
  const auto n = transition.rows();
  if (n == 0 || transition.cols() != n) {
    throw std::invalid_argument("transition matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = transition(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("transition entries must lie in [0,1]");
      }
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > 1e-12) {
      throw std::invalid_argument("transition row " + std::to_string(i) +
                                  " sums to " + std::to_string(row_sum) +
                                  ", not 1");
    }
  }
  if (boundary.empty()) throw std::invalid_argument("boundary state set must be nonempty");
  for (int b : boundary) {
    if (b < 0 || b >= n) throw std::invalid_argument("boundary state index out of range");
  }
  if (x0 < 0 || x0 >= n) throw std::invalid_argument("initial state index out of range");
  if (is_boundary(x0)) {
    throw std::invalid_argument("initial state must not be a boundary state");
  }
}

bool MarkovChainSpec::is_boundary(int state) const {
  for (int b : boundary) {
    if (b == state) return true;
  }
  return false;
}

Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd& corr) {
  const auto n = corr.rows();
  if (corr.cols() != n) throw std::invalid_argument("correlation matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("correlation matrix must have unit diagonal");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-12) {
        throw std::invalid_argument("correlation matrix must be symmetric");
      }
    }
  }
  // outer-product Cholesky with zero pivots admitted, so exactly singular
  // correlation structures (e.g. perfectly coupled coordinates) factor too
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  constexpr double kPivotTol = 1e-10;
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = corr(j, j) - L.row(j).head(j).squaredNorm();
    if (d < -kPivotTol) {
      throw std::invalid_argument(
          "correlation matrix is not positive semidefinite (pivot " +
          std::to_string(d) + " at index " + std::to_string(j) + ")");
    }
    d = std::max(d, 0.0);
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double off = corr(i, j) - L.row(i).head(j).dot(L.row(j).head(j));
      if (L(j, j) > kPivotTol) {
        L(i, j) = off / L(j, j);
      } else if (std::abs(off) > 1e-8) {
        throw std::invalid_argument(
            "correlation matrix is not positive semidefinite (rank defect at "
            "index " +
            std::to_string(j) + ")");
      }
    }
  }
  return L;
}

std::optional<double> sample_wiener_fht(const WienerSpec& spec, double dt,
                                        double t_max, RngStream& rng) {
  spec.validate();
  const long n = step_count(dt, t_max);
  const double sd = std::sqrt(spec.sigma2 * dt);
  const double drift = spec.mu * dt;
  double x = spec.x0;
  for (long k = 1; k <= n; ++k) {
    const double x_next = x + drift + sd * rng.normal();
    if (x_next <= 0.0) return k * dt;
    // the endpoints stayed positive; a Brownian bridge between them still
    // dips below zero with probability exp(-2 x x_next / (sigma2 dt)).  The
    // crossing uniform comes from Phi(normal) so the multivariate sampler
    // can correlate crossings across coordinates yet reduce to this sampler
    // draw for draw in one dimension.
    const double p_cross = std::exp(-2.0 * x * x_next / (spec.sigma2 * dt));
    if (norm_cdf(rng.normal()) < p_cross) return k * dt;
    x = x_next;
  }
  return std::nullopt;
}

std::optional<double> sample_wiener_fht(const WienerSpec& spec, double dt,
                                        double t_max, std::uint64_t seed,
                                        std::uint64_t stream) {
  RngStream rng(seed, stream);
  return sample_wiener_fht(spec, dt, t_max, rng);
}

SamplePath sample_gamma_path(const GammaSpec& spec,
                             const std::vector<double>& grid,
                             std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  if (grid.empty() || grid.front() != 0.0) {
    throw std::invalid_argument("time grid must start at 0");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
  RngStream rng(seed, stream);
  SamplePath path;
  path.times = grid;
  path.states.resize(grid.size());
  path.states[0] = spec.x0;
  const bool susceptible = rng.uniform() < spec.p_susceptible;
  if (!susceptible) {
    for (std::size_t i = 1; i < grid.size(); ++i) path.states[i] = spec.x0;
    return path;
  }
  double z = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    z += rng.gamma(spec.alpha * (grid[i] - grid[i - 1]), spec.beta);
    path.states[i] = spec.x0 - z;
    if (!path.hit && path.states[i] <= 0.0) {
      path.hit = std::make_pair(grid[i], path.states[i]);
    }
  }
  return path;
}

std::optional<MarkovHit> sample_markov_fht(const MarkovChainSpec& spec,
                                           long t_max, RngStream& rng) {
  spec.validate();
  if (t_max < 1) throw std::invalid_argument("step horizon must be at least 1");
  const auto n = spec.transition.rows();
  std::vector<double> row(static_cast<std::size_t>(n));
  int state = spec.x0;
  for (long k = 1; k <= t_max; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      row[static_cast<std::size_t>(j)] = spec.transition(state, j);
    }
    state = rng.categorical(row);
    if (spec.is_boundary(state)) return MarkovHit{k, state};
  }
  return std::nullopt;
}

std::optional<MarkovHit> sample_markov_fht(const MarkovChainSpec& spec,
                                           long t_max, std::uint64_t seed,
                                           std::uint64_t stream) {
  RngStream rng(seed, stream);
  return sample_markov_fht(spec, t_max, rng);
}

std::optional<double> sample_ou_fht(const OuSpec& spec, double boundary_level,
                                    double dt, double t_max,
                                    std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  if (spec.x0 == boundary_level) {
    throw std::invalid_argument("initial level must not lie on the boundary");
  }
  const long n = step_count(dt, t_max);
  // exact one-step transition: conditional mean reverts geometrically, the
  // innovation variance is the stationary variance scaled by 1 - e^(-2 theta dt)
  const double decay = std::exp(-spec.theta * dt);
  const double sd = std::sqrt(spec.sigma2 * -std::expm1(-2.0 * spec.theta * dt) /
                              (2.0 * spec.theta));
  const bool from_above = spec.x0 > boundary_level;
  RngStream rng(seed, stream);
  double x = spec.x0;
  for (long k = 1; k <= n; ++k) {
    x = spec.equilibrium + (x - spec.equilibrium) * decay + sd * rng.normal();
    if (from_above ? (x <= boundary_level) : (x >= boundary_level)) {
      return k * dt;
    }
  }
  return std::nullopt;
}

namespace {

// Shared stepping core for the multivariate Wiener samplers. Per step two
// full vectors of standard normals are always consumed (absorbed
// coordinates included) so coordinate c sees the same draws regardless of
// what the other coordinates did: one vector drives the increments, the
// second drives the within-step bridge crossings through the same
// correlation factor, so perfectly coupled coordinates share one crossing
// decision while independent ones stay independent. Marginally each bridge
// variate is Phi(standard normal), an exact uniform, and for C = 1 the core
// reproduces sample_wiener_fht draw for draw.
std::vector<double> correlated_core(const std::vector<WienerSpec>& specs,
                                    const Eigen::MatrixXd& corr, double dt,
                                    double t_max, RngStream& rng,
                                    std::vector<SamplePath>* paths) {
  if (specs.empty()) throw std::invalid_argument("at least one coordinate spec required");
  for (const auto& s : specs) s.validate();
  const auto c_dim = static_cast<Eigen::Index>(specs.size());
  if (corr.rows() != c_dim || corr.cols() != c_dim) {
    throw std::invalid_argument("correlation matrix dimension must match spec count");
  }
  const Eigen::MatrixXd L = semidefinite_cholesky(corr);
  const long n = step_count(dt, t_max);

  std::vector<double> x(specs.size());
  std::vector<double> sd(specs.size());
  std::vector<double> hit(specs.size(), kInf);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    x[c] = specs[c].x0;
    sd[c] = std::sqrt(specs[c].sigma2 * dt);
  }
  if (paths) {
    paths->assign(specs.size(), SamplePath{});
    for (std::size_t c = 0; c < specs.size(); ++c) {
      (*paths)[c].times.push_back(0.0);
      (*paths)[c].states.push_back(x[c]);
    }
  }

  Eigen::VectorXd z(c_dim);
  Eigen::VectorXd eps(c_dim);
  Eigen::VectorXd z_bridge(c_dim);
  Eigen::VectorXd xi(c_dim);
  std::size_t alive = specs.size();
  for (long k = 1; k <= n && alive > 0; ++k) {
    for (Eigen::Index i = 0; i < c_dim; ++i) z(i) = rng.normal();
    eps.noalias() = L * z;
    for (Eigen::Index i = 0; i < c_dim; ++i) z_bridge(i) = rng.normal();
    xi.noalias() = L * z_bridge;
    const double t = k * dt;
    for (std::size_t c = 0; c < specs.size(); ++c) {
      if (hit[c] < kInf) continue;
      const double x_next =
          x[c] + specs[c].mu * dt + sd[c] * eps(static_cast<Eigen::Index>(c));
      double state_at_hit = 0.0;
      bool crossed = false;
      if (x_next <= 0.0) {
        crossed = true;
        state_at_hit = x_next;
      } else if (norm_cdf(xi(static_cast<Eigen::Index>(c))) <
                 std::exp(-2.0 * x[c] * x_next / (specs[c].sigma2 * dt))) {
        crossed = true;  // bridge dipped to the boundary inside the step
      }
      if (crossed) {
        hit[c] = t;
        --alive;
        if (paths) {
          (*paths)[c].times.push_back(t);
          (*paths)[c].states.push_back(state_at_hit);
          (*paths)[c].hit = std::make_pair(t, state_at_hit);
        }
      } else {
        x[c] = x_next;
        if (paths) {
          (*paths)[c].times.push_back(t);
          (*paths)[c].states.push_back(x_next);
        }
      }
    }
  }
  return hit;
}

}  // namespace

std::vector<SamplePath> sample_correlated_wiener(
    const std::vector<WienerSpec>& specs, const Eigen::MatrixXd& corr,
    double dt, double t_max, std::uint64_t seed, std::uint64_t stream) {
  RngStream rng(seed, stream);
  std::vector<SamplePath> paths;
  correlated_core(specs, corr, dt, t_max, rng, &paths);
  return paths;
}

std::vector<double> correlated_wiener_fht_times(
    const std::vector<WienerSpec>& specs, const Eigen::MatrixXd& corr,
    double dt, double t_max, RngStream& rng) {
  return correlated_core(specs, corr, dt, t_max, rng, nullptr);
}

}  // namespace fhtreg
