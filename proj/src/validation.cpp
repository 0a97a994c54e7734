#include "fhtreg/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fhtreg/fht.hpp"
#include "fhtreg/rng.hpp"

namespace fhtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double KmCurve::survival_at(double t) const {
  auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
  if (it == event_times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - event_times.begin()) - 1];
}

KmCurve kaplan_meier(const std::vector<double>& times,
                     const std::vector<bool>& events) {
  if (times.empty()) throw std::invalid_argument("no survival times given");
  if (times.size() != events.size()) {
    throw std::invalid_argument("time and event vectors differ in length");
  }
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("survival times must be positive");
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (times[a] != times[b]) return times[a] < times[b];
    return events[a] && !events[b];  // events precede censorings at ties
  });

  KmCurve curve;
  long at_risk = static_cast<long>(times.size());
  double surv = 1.0;
  double greenwood_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = times[order[i]];
    long d = 0;
    long c = 0;
    while (i < order.size() && times[order[i]] == t) {
      (events[order[i]] ? d : c) += 1;
      ++i;
    }
    if (d > 0) {
      curve.event_times.push_back(t);
      curve.at_risk.push_back(at_risk);
      surv *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
      if (d == at_risk) {
        surv = 0.0;  // everyone at risk failed; the curve terminates at zero
        curve.greenwood_se.push_back(0.0);
      } else {
        greenwood_sum += static_cast<double>(d) /
                         (static_cast<double>(at_risk) * static_cast<double>(at_risk - d));
        curve.greenwood_se.push_back(surv * std::sqrt(greenwood_sum));
      }
      curve.survival.push_back(surv);
    }
    at_risk -= d + c;
  }
  return curve;
}

double band_at(const SubgroupComparison& comparison, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0,1)");
  }
  const auto b = static_cast<long>(comparison.boot_distances.size());
  if (b == 0) throw std::invalid_argument("no bootstrap distances recorded");
  auto rank = static_cast<long>(std::ceil(confidence * static_cast<double>(b + 1)));
  rank = std::min(std::max(rank, 1L), b);
  return comparison.boot_distances[static_cast<std::size_t>(rank - 1)];
}

namespace {

// distance between a subgroup's product-limit curve and the model curve at
// the subgroup-representative covariates, with the step function compared
// on both sides of each jump
struct CurveDistance {
  KmCurve km;
  std::vector<double> fitted;
  double sup = 0.0;
};

CurveDistance curve_distance(const RegressionData& data, const RegressionSpec& spec,
                             const std::vector<std::size_t>& rows,
                             const Eigen::VectorXd& z_rep) {
  std::vector<double> times;
  std::vector<bool> events;
  times.reserve(rows.size());
  events.reserve(rows.size());
  for (std::size_t idx : rows) {
    times.push_back(data.rows[idx].running_time(spec));
    events.push_back(data.rows[idx].failed);
  }
  CurveDistance out;
  out.km = kaplan_meier(times, events);
  out.fitted = predict_survival(spec, z_rep, out.km.event_times);
  double before_jump = 1.0;
  for (std::size_t k = 0; k < out.km.event_times.size(); ++k) {
    out.sup = std::max(out.sup, std::abs(before_jump - out.fitted[k]));
    out.sup = std::max(out.sup, std::abs(out.km.survival[k] - out.fitted[k]));
    before_jump = out.km.survival[k];
  }
  return out;
}

// censoring distribution resampler: reverse product-limit estimate of the
// censoring law, sampled atom by atom with the leftover mass drawn as "never
// censored"
struct CensoringSampler {
  std::vector<double> atoms;
  std::vector<double> mass;
  double residual = 1.0;

  static CensoringSampler build(const std::vector<double>& times,
                                const std::vector<bool>& events) {
    std::vector<bool> flipped(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) flipped[i] = !events[i];
    CensoringSampler out;
    const KmCurve reverse = kaplan_meier(times, flipped);
    double prev = 1.0;
    for (std::size_t k = 0; k < reverse.event_times.size(); ++k) {
      out.atoms.push_back(reverse.event_times[k]);
      out.mass.push_back(prev - reverse.survival[k]);
      prev = reverse.survival[k];
    }
    out.residual = prev;
    return out;
  }

  double draw(RngStream& rng) const {
    double u = rng.uniform();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      u -= mass[k];
      if (u < 0.0) return atoms[k];
    }
    return kInf;
  }
};

}  // namespace

ValidationReport km_vs_fitted(const FitResult& parent, const RegressionData& data,
                              const std::vector<SubgroupDef>& subgroups,
                              const ValidationOptions& options) {
  if (!parent.converged) throw std::invalid_argument("validation requires a converged fit");
  if (subgroups.empty()) throw std::invalid_argument("at least one subgroup required");
  if (options.bootstrap_replicates < 1) {
    throw std::invalid_argument("at least one bootstrap replicate required");
  }
  const bool composite = parent.shape.n_exposure > 0;
  if (composite) {
    if (!options.exposure_tables ||
        options.exposure_tables->size() != data.rows.size()) {
      throw std::invalid_argument(
          "per-subject exposure tables are required to validate a model with "
          "exposure weights");
    }
  }
  for (const auto& group : subgroups) {
    if (group.rows.empty()) {
      throw std::invalid_argument("subgroup " + group.name + " is empty");
    }
    for (std::size_t idx : group.rows) {
      if (idx >= data.rows.size()) {
        throw std::invalid_argument("subgroup " + group.name + " indexes past the dataset");
      }
    }
  }

  ValidationReport report;
  report.bootstrap_replicates = options.bootstrap_replicates;
  report.confidence = options.confidence;

  // parent comparison per subgroup
  for (const auto& group : subgroups) {
    SubgroupComparison cmp;
    cmp.name = group.name;
    cmp.n_subjects = group.rows.size();
    Eigen::VectorXd z_mean = Eigen::VectorXd::Zero(data.rows.front().z.size());
    for (std::size_t idx : group.rows) {
      z_mean += data.rows[idx].z;
      cmp.n_events += data.rows[idx].failed ? 1 : 0;
    }
    z_mean /= static_cast<double>(group.rows.size());
    cmp.representative_z = z_mean;
    cmp.zero_events = cmp.n_events == 0;
    if (!cmp.zero_events) {
      CurveDistance dist = curve_distance(data, parent.spec, group.rows, z_mean);
      cmp.km = std::move(dist.km);
      cmp.fitted_survival = std::move(dist.fitted);
      cmp.sup_distance = dist.sup;
    }
    report.subgroups.push_back(std::move(cmp));
  }

  // parent censoring law and per-subject follow-up horizons, on the
  // calendar scale (identity running time makes the two scales coincide)
  std::vector<double> calendar_times;
  std::vector<bool> event_flags;
  for (const auto& row : data.rows) {
    calendar_times.push_back(row.time);
    event_flags.push_back(row.failed);
  }
  const CensoringSampler censoring = CensoringSampler::build(calendar_times, event_flags);
  const double global_horizon =
      *std::max_element(calendar_times.begin(), calendar_times.end());

  FitOptions refit_options;
  refit_options.optim = options.optim;
  refit_options.start = parent.theta;

  for (int b = 1; b <= options.bootstrap_replicates; ++b) {
    RngStream rng(options.seed, static_cast<std::uint64_t>(b));
    RegressionData replicate;
    replicate.rows.reserve(data.rows.size());
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      const auto& row = data.rows[i];
      const LinkedParams params = apply_links(parent.spec, row.z);
      // latent hitting time on the running scale, from the fitted model
      double s_running = kInf;
      const bool susceptible =
          !parent.spec.cure || rng.uniform() < params.p_susceptible;
      if (susceptible) {
        const auto draw = ig_sample(IgParams{params.mu, 1.0, params.x0}, rng);
        if (draw) s_running = *draw;
      }
      // back to calendar time
      double s_calendar = kInf;
      double horizon = global_horizon;
      const ExposureTable* table = nullptr;
      if (composite) {
        table = &(*options.exposure_tables)[i];
        horizon = table->times.back();
        const double r_horizon =
            table->occupancy_at(horizon).dot(*parent.spec.alpha);
        if (s_running <= r_horizon) {
          s_calendar = invert_running_time(s_running, *table, *parent.spec.alpha).lower;
        }
      } else {
        s_calendar = s_running;
      }
      const double censor = censoring.draw(rng);
      SurvivalRow new_row = row;
      const double limit = std::min(censor, horizon);
      if (s_calendar <= limit) {
        new_row.time = s_calendar;
        new_row.failed = true;
      } else {
        new_row.time = std::isfinite(limit) ? limit : horizon;
        new_row.failed = false;
      }
      if (composite) new_row.occupancy = table->occupancy_at(new_row.time);
      replicate.rows.push_back(std::move(new_row));
    }

    try {
      const FitResult refit = fit(replicate, parent.shape, refit_options);
      for (std::size_t g = 0; g < subgroups.size(); ++g) {
        const CurveDistance dist =
            curve_distance(replicate, refit.spec, subgroups[g].rows,
                           report.subgroups[g].representative_z);
        report.subgroups[g].boot_distances.push_back(dist.sup);
      }
    } catch (const std::exception&) {
      // a degenerate replicate (e.g. no events) yields no distance; the
      // band uses the replicates that did fit
      continue;
    }
  }

  for (auto& cmp : report.subgroups) {
    std::sort(cmp.boot_distances.begin(), cmp.boot_distances.end());
    if (!cmp.boot_distances.empty()) cmp.band = band_at(cmp, options.confidence);
  }
  return report;
}

}  // namespace fhtreg
