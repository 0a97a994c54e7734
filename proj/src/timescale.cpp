#include "fhtreg/timescale.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fhtreg {

namespace {

void validate_alphas(const ExposureTable& table, const Eigen::VectorXd& alphas) {
  if (alphas.size() != table.cum.cols()) {
    throw std::invalid_argument("category weight count must match exposure categories");
  }
  for (Eigen::Index j = 0; j < alphas.size(); ++j) {
    if (!(alphas(j) >= 0.0) || !std::isfinite(alphas(j))) {
      throw std::invalid_argument("category weights must be nonnegative and finite");
    }
  }
  if (alphas(alphas.size() - 1) != 1.0) {
    throw std::invalid_argument("the last category weight is the numeraire and must equal 1");
  }
}

// running time at each breakpoint under the given weights
std::vector<double> breakpoint_running_times(const ExposureTable& table,
                                             const Eigen::VectorXd& alphas) {
  std::vector<double> r(table.times.size());
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    r[i] = table.cum.row(static_cast<Eigen::Index>(i)) * alphas;
  }
  return r;
}

}  // namespace

void AnalyticTimeSpec::validate() const {
  if (!(lambda > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("analytic time transform requires lambda > 0 and gamma > 0");
  }
}

double analytic_running_time(double t, const AnalyticTimeSpec& spec) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("calendar time must be nonnegative");
  return -std::expm1(-spec.lambda * std::pow(t, spec.gamma));
}

void ExposureTable::validate() const {
  if (times.empty() || times.front() != 0.0) {
    throw std::invalid_argument("exposure table must start at time 0");
  }
  if (cum.rows() != static_cast<Eigen::Index>(times.size()) || cum.cols() < 1) {
    throw std::invalid_argument("exposure table shape mismatch");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("exposure breakpoints must be strictly increasing (row " +
                                  std::to_string(i) + ")");
    }
    double total = 0.0;
    for (Eigen::Index j = 0; j < cum.cols(); ++j) {
      if (cum(row, j) < 0.0 || (i > 0 && cum(row, j) < cum(row - 1, j))) {
        throw std::invalid_argument("cumulative exposure must be nondecreasing (row " +
                                    std::to_string(i) + ", category " +
                                    std::to_string(j) + ")");
      }
      total += cum(row, j);
    }
    if (std::abs(total - times[i]) > 1e-9) {
      throw std::invalid_argument(
          "exposure categories must account for all calendar time (row " +
          std::to_string(i) + ": categories sum to " + std::to_string(total) +
          " but time is " + std::to_string(times[i]) + ")");
    }
  }
}

Eigen::VectorXd ExposureTable::occupancy_at(double t) const {
  if (t < 0.0) throw std::invalid_argument("calendar time must be nonnegative");
  if (t > times.back() + 1e-12) {
    throw std::invalid_argument("calendar time " + std::to_string(t) +
                                " lies beyond the tabulated exposure horizon " +
                                std::to_string(times.back()));
  }
  if (t >= times.back()) return cum.row(cum.rows() - 1);
  // locate the enclosing breakpoint interval and interpolate linearly
  std::size_t hi = 1;
  while (times[hi] < t) ++hi;
  const auto lo = static_cast<Eigen::Index>(hi - 1);
  const double span = times[hi] - times[hi - 1];
  const double frac = (t - times[hi - 1]) / span;
  return cum.row(lo) + frac * (cum.row(static_cast<Eigen::Index>(hi)) - cum.row(lo));
}

double composite_running_time(double t, const ExposureTable& table,
                              const Eigen::VectorXd& alphas) {
  table.validate();
  validate_alphas(table, alphas);
  return table.occupancy_at(t).dot(alphas);
}

InvertedTime invert_running_time(double r, const AnalyticTimeSpec& spec) {
  spec.validate();
  if (r < 0.0 || r >= 1.0) {
    throw std::invalid_argument("running-time value outside the transform range [0, 1)");
  }
  const double t = std::pow(-std::log1p(-r) / spec.lambda, 1.0 / spec.gamma);
  return InvertedTime{t, t};
}

InvertedTime invert_running_time(double r, const ExposureTable& table,
                                 const Eigen::VectorXd& alphas) {
  table.validate();
  validate_alphas(table, alphas);
  const auto rk = breakpoint_running_times(table, alphas);
  if (r < -1e-12 || r > rk.back() + 1e-12) {
    throw std::invalid_argument("running-time value outside the tabulated range");
  }
  r = std::min(std::max(r, 0.0), rk.back());
  const std::size_t n = rk.size();
  // the transform is piecewise linear and nondecreasing across breakpoints,
  // so the preimage of r is a point on a strictly increasing segment and a
  // closed calendar interval across a flat one
  InvertedTime out;
  // leftmost calendar time reaching r: first breakpoint with rk >= r
  std::size_t i = 0;
  while (rk[i] < r) ++i;
  if (i == 0) {
    out.lower = table.times[0];
  } else {
    const double frac = (r - rk[i - 1]) / (rk[i] - rk[i - 1]);
    out.lower = table.times[i - 1] + frac * (table.times[i] - table.times[i - 1]);
  }
  // rightmost calendar time still at r: last breakpoint with rk <= r
  std::size_t j = n - 1;
  while (rk[j] > r) --j;
  if (j == n - 1) {
    out.upper = table.times[n - 1];
  } else {
    const double frac = (r - rk[j]) / (rk[j + 1] - rk[j]);
    out.upper = table.times[j] + frac * (table.times[j + 1] - table.times[j]);
  }
  out.upper = std::max(out.upper, out.lower);
  return out;
}

}  // namespace fhtreg
