#include "fhtreg/competing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fhtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// observed (time, cause) from latent per-cause times.  Step-grid simulation
// can land two causes on the same discrete hitting time even though the
// underlying continuous race has no ties; breaking those uniformly at random
// (when a stream is supplied) keeps exchangeable causes exchangeable instead
// of systematically favoring the lowest index.
void assign_observed(CompetingOutcome& out, RngStream* rng) {
  const auto& latent = *out.latent_times;
  double best = kInf;
  std::vector<std::size_t> argmin;
  for (std::size_t c = 0; c < latent.size(); ++c) {
    if (latent[c] < best) {
      best = latent[c];
      argmin.assign(1, c);
    } else if (latent[c] == best && best < kInf) {
      argmin.push_back(c);
    }
  }
  if (argmin.empty()) {
    out.time = out.horizon;
    out.cause = 0;
    return;
  }
  std::size_t pick = argmin.front();
  if (argmin.size() > 1 && rng) {
    const auto k = static_cast<std::size_t>(rng->uniform() *
                                            static_cast<double>(argmin.size()));
    pick = argmin[std::min(k, argmin.size() - 1)];
  }
  out.time = best;
  out.cause = static_cast<int>(pick) + 1;
}

}  // namespace

CompetingOutcome simulate_competing(const std::vector<WienerSpec>& specs,
                                    const Eigen::MatrixXd& corr, double dt,
                                    double t_max, RngStream& rng) {
  CompetingOutcome out;
  out.horizon = t_max;
  out.latent_times = correlated_wiener_fht_times(specs, corr, dt, t_max, rng);
  assign_observed(out, &rng);
  return out;
}

CompetingOutcome simulate_competing(const std::vector<WienerSpec>& specs,
                                    const Eigen::MatrixXd& corr, double dt,
                                    double t_max, std::uint64_t seed,
                                    std::uint64_t stream) {
  RngStream rng(seed, stream);
  return simulate_competing(specs, corr, dt, t_max, rng);
}

CompetingOutcome eliminate_causes(const CompetingOutcome& outcome,
                                  const std::vector<int>& removed) {
  if (!outcome.latent_times) {
    throw std::invalid_argument("latent cause times are required to eliminate causes");
  }
  const auto n_causes = static_cast<int>(outcome.latent_times->size());
  std::vector<bool> drop(static_cast<std::size_t>(n_causes), false);
  for (int c : removed) {
    if (c < 1 || c > n_causes) {
      throw std::invalid_argument("cause index " + std::to_string(c) + " out of range");
    }
    drop[static_cast<std::size_t>(c - 1)] = true;
  }
  if (std::all_of(drop.begin(), drop.end(), [](bool d) { return d; })) {
    throw std::invalid_argument("cannot eliminate every cause");
  }
  CompetingOutcome out = outcome;
  for (std::size_t c = 0; c < drop.size(); ++c) {
    if (drop[c]) (*out.latent_times)[c] = kInf;
  }
  // removing causes other than the observed one cannot change the race
  // winner, so the outcome (including any recorded tie-break) stands
  if (out.cause != 0 && !drop[static_cast<std::size_t>(out.cause - 1)]) {
    return out;
  }
  assign_observed(out, nullptr);
  return out;
}

double secondary_condition_distance(const CompetingOutcome& outcome, int cause) {
  if (!outcome.latent_times) {
    throw std::invalid_argument("latent cause times are required for the gap");
  }
  if (outcome.cause == 0) {
    throw std::invalid_argument("outcome is censored; there is no observed cause");
  }
  const auto n_causes = static_cast<int>(outcome.latent_times->size());
  if (cause < 1 || cause > n_causes) {
    throw std::invalid_argument("cause index out of range");
  }
  if (cause == outcome.cause) {
    throw std::invalid_argument("the gap is defined against a non-observed cause");
  }
  return (*outcome.latent_times)[static_cast<std::size_t>(cause - 1)] - outcome.time;
}

}  // namespace fhtreg
