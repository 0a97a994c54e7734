#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fhtreg/rng.hpp"

namespace fhtreg {

/// Wiener process X(t) = x0 + mu t + sigma W(t); the boundary is the zero
/// level and the process starts above it.
struct WienerSpec {
  double mu = 0.0;
  double sigma2 = 1.0;
  double x0 = 1.0;

  void validate() const;
};

/// Decreasing degradation path X(t) = x0 - Z(t) with Z a gamma process
/// (independent Gamma(alpha dt, beta) increments); a 1 - p_susceptible
/// fraction of subjects never degrades.
struct GammaSpec {
  double alpha = 1.0;
  double beta = 1.0;
  double x0 = 1.0;
  double p_susceptible = 1.0;

  void validate() const;
};

/// Poisson event count; the hitting time is the arrival of the m-th event.
struct PoissonSpec {
  double lambda = 1.0;
  long m = 1;

  void validate() const;
};

/// Bernoulli trial sequence; the hitting time is the trial index of the
/// m-th success.
struct BernoulliSpec {
  double p = 0.5;
  long m = 1;

  void validate() const;
};

/// Mean-reverting diffusion dX = theta (equilibrium - X) dt + sigma dW.
struct OuSpec {
  double theta = 1.0;
  double equilibrium = 0.0;
  double sigma2 = 1.0;
  double x0 = 1.0;

  void validate() const;
};

/// Finite-state chain with a designated set of boundary (stopping) states.
struct MarkovChainSpec {
  Eigen::MatrixXd transition;
  int x0 = 0;
  std::vector<int> boundary;

  void validate() const;
  bool is_boundary(int state) const;
};

/// A sampled trajectory; hit carries (time, state at detection) when the
/// path reached the boundary.
struct SamplePath {
  std::vector<double> times;
  std::vector<double> states;
  std::optional<std::pair<double, double>> hit;
};

/// First crossing of the zero level on a dt grid, with the Brownian-bridge
/// within-step crossing probability exp(-2 a b / (sigma2 dt)) applied so the
/// crossing law is exact up to grid rounding of the reported time. Absent
/// when no crossing occurs by t_max.
std::optional<double> sample_wiener_fht(const WienerSpec& spec, double dt,
                                        double t_max, std::uint64_t seed,
                                        std::uint64_t stream = 0);

/// Same crossing rule driven by a caller-owned stream (one replicate per
/// substream keeps Monte Carlo loops order-independent).
std::optional<double> sample_wiener_fht(const WienerSpec& spec, double dt,
                                        double t_max, RngStream& rng);

/// Gamma degradation path on the given grid (strictly increasing, starting
/// at 0); increments are exact gamma variates, so the only discretization
/// is the grid itself.
SamplePath sample_gamma_path(const GammaSpec& spec,
                             const std::vector<double>& grid,
                             std::uint64_t seed, std::uint64_t stream = 0);

struct MarkovHit {
  long steps = 0;
  int state = 0;
};

/// Runs the chain until a boundary state is entered or t_max steps elapse.
std::optional<MarkovHit> sample_markov_fht(const MarkovChainSpec& spec,
                                           long t_max, std::uint64_t seed,
                                           std::uint64_t stream = 0);

std::optional<MarkovHit> sample_markov_fht(const MarkovChainSpec& spec,
                                           long t_max, RngStream& rng);

/// First crossing of boundary_level using the exact Gaussian transition of
/// the process over each step (no drift discretization); crossings are
/// detected at grid points only.
std::optional<double> sample_ou_fht(const OuSpec& spec, double boundary_level,
                                    double dt, double t_max,
                                    std::uint64_t seed,
                                    std::uint64_t stream = 0);

/// Jointly Gaussian increments with the given cross-correlation per unit
/// time; each coordinate carries its own zero boundary and bridge-corrected
/// crossing detection. Simulation stops once every coordinate has been
/// absorbed or t_max is reached; paths record the grid up to that point.
std::vector<SamplePath> sample_correlated_wiener(
    const std::vector<WienerSpec>& specs, const Eigen::MatrixXd& corr,
    double dt, double t_max, std::uint64_t seed, std::uint64_t stream = 0);

/// Latent zero-crossing times only (shared stepping core of
/// sample_correlated_wiener without path storage); +infinity marks a
/// coordinate that never crossed by t_max.
std::vector<double> correlated_wiener_fht_times(
    const std::vector<WienerSpec>& specs, const Eigen::MatrixXd& corr,
    double dt, double t_max, RngStream& rng);

/// Cholesky-like factor of a correlation matrix that tolerates positive
/// semidefinite inputs (zero pivots allowed); rejects indefinite matrices.
Eigen::MatrixXd semidefinite_cholesky(const Eigen::MatrixXd& corr);

}  // namespace fhtreg
