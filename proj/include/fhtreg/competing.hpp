#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fhtreg/process.hpp"

namespace fhtreg {

/// Outcome of a multi-cause hitting-time race: the observed time and cause
/// are those of the smallest latent per-cause time. cause is 1-based; 0
/// means no cause fired by the horizon (censored at the horizon). When the
/// simulation exposes them, latent_times carries every cause's own time
/// with +infinity marking a cause that never fired.
struct CompetingOutcome {
  double time = 0.0;
  int cause = 0;
  double horizon = 0.0;
  std::optional<std::vector<double>> latent_times;
};

/// Simulates one subject: each coordinate of a correlated Wiener vector
/// carries its own zero boundary; the first coordinate to cross determines
/// the observed cause. Simultaneous same-step crossings are a step-size
/// artifact (impossible in continuous time) and resolve uniformly at
/// random so exchangeable causes stay exchangeable.
CompetingOutcome simulate_competing(const std::vector<WienerSpec>& specs,
                                    const Eigen::MatrixXd& corr, double dt,
                                    double t_max, std::uint64_t seed,
                                    std::uint64_t stream = 0);

CompetingOutcome simulate_competing(const std::vector<WienerSpec>& specs,
                                    const Eigen::MatrixXd& corr, double dt,
                                    double t_max, RngStream& rng);

/// Counterfactual removal of causes: the outcome recomputed as if the
/// removed causes could not fire (their latent times pushed to +infinity).
/// The new time can only be later or equal, pathwise; removing causes
/// other than the observed one leaves the outcome unchanged, and when the
/// observed cause is removed a remaining tie resolves to the lowest index.
CompetingOutcome eliminate_causes(const CompetingOutcome& outcome,
                                  const std::vector<int>& removed);

/// Gap S_c - S_d between cause c's latent time and the observed time;
/// nonnegative because d is the argmin.
double secondary_condition_distance(const CompetingOutcome& outcome, int cause);

}  // namespace fhtreg
