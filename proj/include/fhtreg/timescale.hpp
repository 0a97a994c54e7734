#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fhtreg {

/// Smooth calendar-to-running-time transform r(t) = 1 - exp(-lambda t^gamma).
struct AnalyticTimeSpec {
  double lambda = 1.0;
  double gamma = 1.0;

  void validate() const;
};

double analytic_running_time(double t, const AnalyticTimeSpec& spec);

/// Per-subject exposure history: cum(i, j) is the cumulative time spent in
/// category j up to breakpoint times[i], interpolated linearly in between
/// (constant occupancy rates within an interval). Every breakpoint must
/// satisfy the accounting constraint sum_j cum(i, j) = times[i]: the
/// categories partition calendar time.
struct ExposureTable {
  std::vector<double> times;
  Eigen::MatrixXd cum;

  void validate() const;
  /// Interpolated per-category occupancy r_j(t); t beyond the tabulated
  /// horizon is rejected.
  Eigen::VectorXd occupancy_at(double t) const;
};

/// Exposure-weighted running time r(t) = sum_j alpha_j r_j(t). The last
/// weight is the numeraire and must equal 1 exactly; weights are
/// nonnegative (a zero weight freezes the clock while that category is
/// occupied).
double composite_running_time(double t, const ExposureTable& table,
                              const Eigen::VectorXd& alphas);

/// Preimage of a running-time value. For strictly increasing transforms
/// lower == upper; a flat segment of the composite scale maps back to the
/// whole calendar interval that produced it.
struct InvertedTime {
  double lower = 0.0;
  double upper = 0.0;

  bool is_interval() const { return upper > lower; }
};

InvertedTime invert_running_time(double r, const AnalyticTimeSpec& spec);
InvertedTime invert_running_time(double r, const ExposureTable& table,
                                 const Eigen::VectorXd& alphas);

}  // namespace fhtreg
