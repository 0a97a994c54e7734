#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fhtreg/regression.hpp"
#include "fhtreg/timescale.hpp"

namespace fhtreg {

/// Product-limit survival curve. survival[k] is the curve value just after
/// event_times[k]; at_risk[k] counts subjects under observation just before
/// it; greenwood_se[k] is the usual variance estimate's square root.
struct KmCurve {
  std::vector<double> event_times;
  std::vector<double> survival;
  std::vector<long> at_risk;
  std::vector<double> greenwood_se;

  /// Step-function value at t (right-continuous; 1 before the first event).
  double survival_at(double t) const;
};

/// Product-limit estimator. Tied events and censorings at the same time are
/// resolved events-first, so subjects censored at an event time still count
/// as at risk for it. Flipping the event indicators therefore estimates the
/// censoring distribution with the standard reverse convention.
KmCurve kaplan_meier(const std::vector<double>& times,
                     const std::vector<bool>& events);

struct SubgroupDef {
  std::string name;
  std::vector<std::size_t> rows;  // indices into the dataset
};

struct SubgroupComparison {
  std::string name;
  std::size_t n_subjects = 0;
  long n_events = 0;
  bool zero_events = false;
  KmCurve km;
  Eigen::VectorXd representative_z;      // subgroup covariate means
  std::vector<double> fitted_survival;   // model curve at the KM event times
  double sup_distance = 0.0;             // between KM and the model curve
  double band = 0.0;                     // bootstrap critical distance
  std::vector<double> boot_distances;    // sorted replicate distances
};

struct ValidationReport {
  std::vector<SubgroupComparison> subgroups;
  int bootstrap_replicates = 0;
  double confidence = 0.0;
};

struct ValidationOptions {
  int bootstrap_replicates = 49;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  OptimOptions optim;  // replicate refits (warm-started at the parent fit)
  /// Per-row exposure histories, required when the fitted model carries
  /// exposure weights: replicates then re-estimate the weights too, so the
  /// band accounts for the fitted time scale.
  const std::vector<ExposureTable>* exposure_tables = nullptr;
};

/// Compares the Kaplan-Meier curve of each covariate subgroup against the
/// fitted model curve at the subgroup's mean covariates, on the running-time
/// scale, and calibrates the sup-distance with a seeded parametric
/// bootstrap: each replicate resimulates every subject from the fitted
/// model (censoring resampled from its reverse Kaplan-Meier estimate),
/// refits, and records its own subgroup distances.
ValidationReport km_vs_fitted(const FitResult& fit, const RegressionData& data,
                              const std::vector<SubgroupDef>& subgroups,
                              const ValidationOptions& options = {});

/// Critical distance at another confidence level from the stored replicate
/// distances.
double band_at(const SubgroupComparison& comparison, double confidence);

}  // namespace fhtreg
