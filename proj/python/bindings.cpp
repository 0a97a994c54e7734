#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fhtreg/competing.hpp"
#include "fhtreg/dataset.hpp"
#include "fhtreg/fht.hpp"
#include "fhtreg/model_io.hpp"
#include "fhtreg/process.hpp"
#include "fhtreg/regression.hpp"
#include "fhtreg/timescale.hpp"
#include "fhtreg/validation.hpp"

namespace py = pybind11;
using namespace fhtreg;

namespace {

IgParams make_ig(double mu, double sigma2, double x0) {
  IgParams p{mu, sigma2, x0};
  p.validate();
  return p;
}

RegressionData data_from_arrays(const std::vector<double>& times,
                                const std::vector<int>& events,
                                const Eigen::MatrixXd& z) {
  if (times.size() != events.size() ||
      static_cast<Eigen::Index>(times.size()) != z.rows())
    throw std::invalid_argument("times, events, and z row counts must match");
  RegressionData data;
  for (std::size_t i = 0; i < times.size(); ++i) {
    SurvivalRow row;
    row.id = std::to_string(i + 1);
    row.time = times[i];
    row.failed = events[i] != 0;
    row.z = Eigen::VectorXd(z.cols() + 1);
    row.z[0] = 1.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      row.z[j + 1] = z(static_cast<Eigen::Index>(i), j);
    data.rows.push_back(std::move(row));
  }
  return data;
}

py::dict fit_to_dict(const FitResult& fit) {
  py::dict out;
  out["beta"] = fit.spec.beta;
  out["gamma"] = fit.spec.gamma;
  if (fit.spec.cure) out["cure"] = *fit.spec.cure;
  if (fit.spec.alpha) out["alpha"] = *fit.spec.alpha;
  out["theta"] = fit.theta;
  out["stderr"] = fit.stderr_theta;
  out["loglik"] = fit.loglik;
  out["converged"] = fit.converged;
  out["singular_information"] = fit.singular_information;
  out["iterations"] = fit.iterations;
  out["warnings"] = fit.warnings;
  out["parameter_names"] = fit.shape.parameter_names();
  return out;
}

}  // namespace

PYBIND11_MODULE(_fhtreg, m) {
  m.doc() = "first-hitting-time survival regression core";

  // Hitting-time law of the drifted Wiener process.
  m.def(
      "ig_pdf",
      [](double r, double mu, double sigma2, double x0) {
        return ig_pdf(r, make_ig(mu, sigma2, x0));
      },
      py::arg("r"), py::arg("mu"), py::arg("sigma2") = 1.0, py::arg("x0") = 1.0);
  m.def(
      "ig_cdf",
      [](double r, double mu, double sigma2, double x0) {
        return ig_cdf(r, make_ig(mu, sigma2, x0));
      },
      py::arg("r"), py::arg("mu"), py::arg("sigma2") = 1.0, py::arg("x0") = 1.0);
  m.def(
      "ig_log_survival",
      [](double r, double mu, double sigma2, double x0) {
        return ig_log_survival(r, make_ig(mu, sigma2, x0));
      },
      py::arg("r"), py::arg("mu"), py::arg("sigma2") = 1.0, py::arg("x0") = 1.0);
  m.def(
      "prob_finite_fht",
      [](double mu, double sigma2, double x0) {
        return prob_finite_fht(make_ig(mu, sigma2, x0));
      },
      py::arg("mu"), py::arg("sigma2") = 1.0, py::arg("x0") = 1.0);

  // Monte Carlo samplers.
  m.def(
      "sample_wiener_fht",
      [](double mu, double sigma2, double x0, double dt, double t_max,
         std::uint64_t seed, std::uint64_t stream) {
        WienerSpec spec{mu, sigma2, x0};
        return sample_wiener_fht(spec, dt, t_max, seed, stream);
      },
      py::arg("mu"), py::arg("sigma2"), py::arg("x0"), py::arg("dt") = 1e-3,
      py::arg("t_max") = 100.0, py::arg("seed") = 0, py::arg("stream") = 0);
  m.def(
      "ig_sample",
      [](double mu, double sigma2, double x0, std::uint64_t seed,
         std::uint64_t stream) {
        RngStream rng(seed, stream);
        return ig_sample(make_ig(mu, sigma2, x0), rng);
      },
      py::arg("mu"), py::arg("sigma2"), py::arg("x0"), py::arg("seed") = 0,
      py::arg("stream") = 0);

  // Regression fitting from plain arrays.
  m.def(
      "fit",
      [](const std::vector<double>& times, const std::vector<int>& events,
         const Eigen::MatrixXd& z, bool cure, int starts,
         std::uint64_t seed) {
        RegressionData data = data_from_arrays(times, events, z);
        FitOptions options;
        options.starts = starts;
        options.start_seed = seed;
        ModelShape shape;
        shape.n_covariates = data.n_covariates();
        shape.cure = cure;
        return fit_to_dict(fit(data, shape, options));
      },
      py::arg("times"), py::arg("events"), py::arg("z"),
      py::arg("cure") = false, py::arg("starts") = 1, py::arg("seed") = 0);
  m.def(
      "loglik",
      [](const std::vector<double>& times, const std::vector<int>& events,
         const Eigen::MatrixXd& z, const Eigen::VectorXd& beta,
         const Eigen::VectorXd& gamma) {
        RegressionData data = data_from_arrays(times, events, z);
        RegressionSpec spec;
        spec.beta = beta;
        spec.gamma = gamma;
        return sample_loglik(data, spec);
      },
      py::arg("times"), py::arg("events"), py::arg("z"), py::arg("beta"),
      py::arg("gamma"));
  m.def(
      "predict_survival",
      [](const Eigen::VectorXd& beta, const Eigen::VectorXd& gamma,
         const Eigen::VectorXd& z_row, const std::vector<double>& r_grid) {
        RegressionSpec spec;
        spec.beta = beta;
        spec.gamma = gamma;
        Eigen::VectorXd z(z_row.size() + 1);
        z[0] = 1.0;
        z.tail(z_row.size()) = z_row;
        return predict_survival(spec, z, r_grid);
      },
      py::arg("beta"), py::arg("gamma"), py::arg("z_row"), py::arg("r_grid"));

  // Kaplan-Meier estimator.
  m.def(
      "kaplan_meier",
      [](const std::vector<double>& times, const std::vector<bool>& events) {
        KmCurve km = kaplan_meier(times, events);
        py::dict out;
        out["event_times"] = km.event_times;
        out["survival"] = km.survival;
        out["at_risk"] = km.at_risk;
        out["greenwood_se"] = km.greenwood_se;
        return out;
      },
      py::arg("times"), py::arg("events"));

  // Composite running time.
  m.def(
      "composite_running_time",
      [](double t, const std::vector<double>& times,
         const Eigen::MatrixXd& cum, const Eigen::VectorXd& alphas) {
        ExposureTable table{times, cum};
        return composite_running_time(t, table, alphas);
      },
      py::arg("t"), py::arg("times"), py::arg("cum"), py::arg("alphas"));
}
