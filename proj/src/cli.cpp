#include "fhtreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhtreg/competing.hpp"
#include "fhtreg/dataset.hpp"
#include "fhtreg/fht.hpp"
#include "fhtreg/longitudinal.hpp"
#include "fhtreg/model_io.hpp"
#include "fhtreg/process.hpp"
#include "fhtreg/regression.hpp"
#include "fhtreg/rng.hpp"
#include "fhtreg/validation.hpp"

namespace fhtreg {

namespace {

constexpr const char* kToolVersion = "fhtreg 1.0";

std::string fmt17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string fmt6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

// Writes through either a file or the provided stream when path is "-".
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback)
      : fallback_(fallback) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write output file '" + path + "'");
      use_file_ = true;
      path_ = path;
    }
  }

  std::ostream& stream() { return use_file_ ? file_ : fallback_; }

  void finish() {
    if (use_file_) {
      file_.close();
      if (!file_) throw std::runtime_error("failed writing output file '" + path_ + "'");
    }
  }

 private:
  std::ostream& fallback_;
  std::ofstream file_;
  bool use_file_ = false;
  std::string path_;
};

struct SimulateArgs {
  std::string process;
  long n = 0;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::vector<double> mu;
  double sigma2 = 1.0;
  double x0 = 1.0;
  double dt = 1e-3;
  double t_max = 100.0;
  double alpha = 1.0;
  double beta = 1.0;
  double p_susceptible = 1.0;
  double grid_step = 0.01;
  double lambda = 1.0;
  long m = 1;
  double p = 0.5;
  double theta = 1.0;
  double equilibrium = 0.0;
  double boundary = 0.0;
  double absorb = 0.5;
  long max_steps = 1000000;
  double rho = 0.0;
};

void append_row(Dataset& data, long index, double time, int event,
                std::optional<int> cause = std::nullopt) {
  DatasetRow row;
  row.id = std::to_string(index);
  row.time = time;
  row.event = event;
  row.cause = cause;
  data.rows.push_back(std::move(row));
}

// One stream per subject, numbered 1..n: replicate i is reproducible on its
// own and the loop order never matters.
Dataset simulate_dataset(const SimulateArgs& a) {
  Dataset data;
  if (a.n <= 0) throw std::runtime_error("--n must be positive");

  if (a.process == "wiener") {
    if (a.mu.size() != 1)
      throw std::runtime_error("--process wiener needs exactly one --mu");
    WienerSpec spec{a.mu[0], a.sigma2, a.x0};
    spec.validate();
    for (long i = 1; i <= a.n; ++i) {
      RngStream rng(a.seed, static_cast<std::uint64_t>(i));
      std::optional<double> hit = sample_wiener_fht(spec, a.dt, a.t_max, rng);
      append_row(data, i, hit ? *hit : a.t_max, hit ? 1 : 0);
    }
  } else if (a.process == "gamma") {
    GammaSpec spec{a.alpha, a.beta, a.x0, a.p_susceptible};
    spec.validate();
    if (a.grid_step <= 0.0) throw std::runtime_error("--grid-step must be positive");
    std::vector<double> grid;
    for (double t = 0.0; t <= a.t_max + 1e-12; t += a.grid_step)
      grid.push_back(t);
    for (long i = 1; i <= a.n; ++i) {
      SamplePath path = sample_gamma_path(spec, grid, a.seed,
                                          static_cast<std::uint64_t>(i));
      if (path.hit)
        append_row(data, i, path.hit->first, 1);
      else
        append_row(data, i, grid.back(), 0);
    }
  } else if (a.process == "poisson") {
    PoissonSpec spec{a.lambda, a.m};
    spec.validate();
    for (long i = 1; i <= a.n; ++i) {
      RngStream rng(a.seed, static_cast<std::uint64_t>(i));
      double time = 0.0;
      for (long k = 0; k < a.m; ++k) time += rng.exponential(a.lambda);
      append_row(data, i, time, 1);
    }
  } else if (a.process == "bernoulli") {
    BernoulliSpec spec{a.p, a.m};
    spec.validate();
    for (long i = 1; i <= a.n; ++i) {
      RngStream rng(a.seed, static_cast<std::uint64_t>(i));
      long successes = 0;
      long trials = 0;
      while (successes < a.m) {
        ++trials;
        if (rng.bernoulli(a.p)) ++successes;
      }
      append_row(data, i, static_cast<double>(trials), 1);
    }
  } else if (a.process == "ou") {
    OuSpec spec{a.theta, a.equilibrium, a.sigma2, a.x0};
    spec.validate();
    for (long i = 1; i <= a.n; ++i) {
      std::optional<double> hit = sample_ou_fht(spec, a.boundary, a.dt, a.t_max,
                                                a.seed,
                                                static_cast<std::uint64_t>(i));
      append_row(data, i, hit ? *hit : a.t_max, hit ? 1 : 0);
    }
  } else if (a.process == "markov") {
    if (!(a.absorb > 0.0 && a.absorb < 1.0))
      throw std::runtime_error("--absorb must lie strictly between 0 and 1");
    MarkovChainSpec spec;
    spec.transition = Eigen::MatrixXd(2, 2);
    spec.transition << 1.0 - a.absorb, a.absorb, 0.0, 1.0;
    spec.x0 = 0;
    spec.boundary = {1};
    spec.validate();
    for (long i = 1; i <= a.n; ++i) {
      std::optional<MarkovHit> hit = sample_markov_fht(
          spec, a.max_steps, a.seed, static_cast<std::uint64_t>(i));
      if (hit)
        append_row(data, i, static_cast<double>(hit->steps), 1);
      else
        append_row(data, i, static_cast<double>(a.max_steps), 0);
    }
  } else if (a.process == "competing") {
    if (a.mu.size() < 2)
      throw std::runtime_error("--process competing needs --mu once per cause (>= 2)");
    int n_causes = static_cast<int>(a.mu.size());
    std::vector<WienerSpec> specs;
    for (double mu : a.mu) {
      WienerSpec s{mu, a.sigma2, a.x0};
      s.validate();
      specs.push_back(s);
    }
    Eigen::MatrixXd corr =
        Eigen::MatrixXd::Constant(n_causes, n_causes, a.rho);
    corr.diagonal().setOnes();
    data.has_cause = true;
    for (long i = 1; i <= a.n; ++i) {
      CompetingOutcome outcome = simulate_competing(
          specs, corr, a.dt, a.t_max, a.seed, static_cast<std::uint64_t>(i));
      append_row(data, i, outcome.time, outcome.cause > 0 ? 1 : 0,
                 outcome.cause);
    }
  } else {
    throw std::runtime_error(
        "unknown --process '" + a.process +
        "' (expected wiener, gamma, poisson, bernoulli, ou, markov, or "
        "competing)");
  }
  return data;
}

struct FitArgs {
  std::string data_path;
  std::string model_out;
  bool cure = false;
  bool no_exposure = false;
  int starts = 1;
  std::uint64_t seed = 0;
  std::string mu_link = "identity";
  std::string x0_link = "log";
};

void check_links(const std::string& mu_link, const std::string& x0_link) {
  // The model theory ties each parameter to one link; the flags exist so a
  // script states its choice explicitly, and anything else is rejected
  // rather than silently reinterpreted.
  if (mu_link != "identity")
    throw std::runtime_error("only the identity link is available for the drift");
  if (x0_link != "log")
    throw std::runtime_error("only the log link is available for the starting level");
}

void print_fit_summary(const FitResult& fit, std::size_t n_subjects,
                       long n_events, std::ostream& out) {
  out << "subjects " << n_subjects << ", events " << n_events << "\n";
  std::vector<std::string> names = fit.shape.parameter_names();
  std::size_t width = 0;
  for (const std::string& name : names) width = std::max(width, name.size());
  for (int i = 0; i < fit.theta.size(); ++i) {
    const std::string& name = names[static_cast<std::size_t>(i)];
    out << name << std::string(width - name.size(), ' ') << "  "
        << fmt17(fit.theta[i]) << "  (se " << fmt17(fit.stderr_theta[i])
        << ")\n";
  }
  out << "loglik " << fmt17(fit.loglik) << "\n";
  out << "converged " << (fit.converged ? "yes" : "no") << ", iterations "
      << fit.iterations << "\n";
  for (const std::string& w : fit.warnings) out << "warning: " << w << "\n";
}

FailureTerm parse_failure_term(const std::string& s) {
  if (s == "exact") return FailureTerm::exact_time;
  if (s == "interval") return FailureTerm::interval;
  throw std::runtime_error("--failure-term must be 'exact' or 'interval'");
}

int run_fit(const FitArgs& a, std::ostream& out) {
  check_links(a.mu_link, a.x0_link);
  Dataset data = load_dataset(a.data_path);

  FitOptions options;
  options.starts = a.starts;
  options.start_seed = a.seed;

  FitResult fit_result;
  std::size_t n_subjects = data.n_subjects();
  long n_events = 0;
  for (const DatasetRow& row : data.rows) n_events += row.event;

  if (data.longitudinal) {
    if (a.cure)
      throw std::runtime_error(
          "cure mixtures are not available for longitudinal records");
    if (!data.exposure_names.empty() && !a.no_exposure)
      throw std::runtime_error(
          "exposure weights are not estimated from longitudinal records; "
          "pass --no-exposure to fit on calendar time");
    std::vector<SubjectRecord> records = data.to_records();
    ModelShape shape;
    shape.n_covariates = static_cast<int>(data.covariate_names.size());
    fit_result = fit_uncoupled(records, shape, options);
  } else {
    RegressionData reg = data.to_regression();
    ModelShape shape;
    shape.n_covariates = reg.n_covariates();
    shape.cure = a.cure;
    if (!data.exposure_names.empty() && !a.no_exposure)
      shape.n_exposure = static_cast<int>(data.exposure_names.size());
    if (a.no_exposure)
      for (SurvivalRow& row : reg.rows) row.occupancy.resize(0);
    fit_result = fit(reg, shape, options);
  }

  print_fit_summary(fit_result, n_subjects, n_events, out);
  if (!a.model_out.empty())
    save_model(make_artifact(fit_result, a.seed), a.model_out);
  return 0;
}

struct PredictArgs {
  std::string model_path;
  std::string data_path;
  std::string out = "-";
  double grid_max = 0.0;  // 0 = infer from the data
  int grid_points = 100;
};

int run_predict(const PredictArgs& a, std::ostream& out_stream) {
  ModelArtifact artifact = load_model(a.model_path);
  if (!artifact.converged)
    throw std::runtime_error(
        "model artifact records a non-converged fit; refusing to predict from it");
  RegressionSpec spec = artifact.spec();
  Dataset data = load_dataset(a.data_path);
  if (data.longitudinal)
    throw std::runtime_error("predict expects one covariate row per subject");
  if (artifact.shape.n_exposure > 0 &&
      static_cast<int>(data.exposure_names.size()) != artifact.shape.n_exposure)
    throw std::runtime_error(
        "model uses " + std::to_string(artifact.shape.n_exposure) +
        " exposure categories but the dataset has " +
        std::to_string(data.exposure_names.size()));
  RegressionData reg = data.to_regression();
  if (reg.n_covariates() != artifact.shape.n_covariates)
    throw std::runtime_error(
        "model uses " + std::to_string(artifact.shape.n_covariates) +
        " covariates but the dataset has " +
        std::to_string(reg.n_covariates()));

  if (a.grid_points < 1) throw std::runtime_error("--grid-points must be >= 1");
  double grid_max = a.grid_max;
  if (grid_max <= 0.0) {
    for (const SurvivalRow& row : reg.rows)
      grid_max = std::max(grid_max, row.running_time(spec));
  }
  if (!(grid_max > 0.0))
    throw std::runtime_error("survival grid horizon must be positive");
  std::vector<double> grid;
  for (int k = 0; k <= a.grid_points; ++k)
    grid.push_back(grid_max * k / a.grid_points);

  OutputTarget target(a.out, out_stream);
  std::ostream& os = target.stream();
  os << "id,r,survival\n";
  for (const SurvivalRow& row : reg.rows) {
    std::vector<double> surv = predict_survival(spec, row.z, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      os << row.id << ',' << fmt17(grid[k]) << ',' << fmt17(surv[k]) << '\n';
  }
  target.finish();
  return 0;
}

struct ValidateArgs {
  std::string model_path;
  std::string data_path;
  std::string report_out;
  std::vector<std::string> subgroup_columns;
  int bootstrap = 99;
  double confidence = 0.95;
  std::uint64_t seed = 0;
};

std::vector<SubgroupDef> build_subgroups(const Dataset& data,
                                         const RegressionData& reg,
                                         const std::vector<std::string>& columns) {
  std::vector<SubgroupDef> defs;
  SubgroupDef all;
  all.name = "all";
  for (std::size_t i = 0; i < reg.rows.size(); ++i) all.rows.push_back(i);
  defs.push_back(std::move(all));

  for (const std::string& column : columns) {
    auto it = std::find(data.covariate_names.begin(),
                        data.covariate_names.end(), column);
    if (it == data.covariate_names.end())
      throw std::runtime_error("no covariate column named '" + column + "'");
    int j = 1 + static_cast<int>(it - data.covariate_names.begin());
    std::vector<double> values;
    for (const SurvivalRow& row : reg.rows) values.push_back(row.z[j]);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[(sorted.size() - 1) / 2];
    SubgroupDef low, high;
    low.name = column + "<=" + fmt6(median);
    high.name = column + ">" + fmt6(median);
    for (std::size_t i = 0; i < values.size(); ++i)
      (values[i] <= median ? low : high).rows.push_back(i);
    if (low.rows.empty() || high.rows.empty())
      throw std::runtime_error("median split on '" + column +
                               "' puts every subject on one side");
    defs.push_back(std::move(low));
    defs.push_back(std::move(high));
  }
  return defs;
}

int run_validate(const ValidateArgs& a, std::ostream& out) {
  ModelArtifact artifact = load_model(a.model_path);
  if (!artifact.converged)
    throw std::runtime_error(
        "model artifact records a non-converged fit; refusing to validate it");
  Dataset data = load_dataset(a.data_path);
  if (data.longitudinal)
    throw std::runtime_error(
        "validate expects censored-survival data (one row per subject)");
  RegressionData reg = data.to_regression();

  // Reconstruct a FitResult view of the artifact for the comparison code.
  FitResult fit;
  fit.shape = artifact.shape;
  fit.theta = artifact.theta;
  fit.spec = artifact.spec();
  fit.stderr_theta = artifact.stderr_theta;
  fit.covariance = artifact.covariance;
  fit.loglik = artifact.loglik;
  fit.converged = artifact.converged;
  fit.singular_information = artifact.singular_information;
  fit.iterations = artifact.iterations;

  ValidationOptions options;
  options.bootstrap_replicates = a.bootstrap;
  options.confidence = a.confidence;
  options.seed = a.seed;

  std::vector<ExposureTable> tables;
  if (artifact.shape.n_exposure > 0) {
    if (static_cast<int>(data.exposure_names.size()) != artifact.shape.n_exposure)
      throw std::runtime_error(
          "model uses " + std::to_string(artifact.shape.n_exposure) +
          " exposure categories but the dataset has " +
          std::to_string(data.exposure_names.size()));
    tables = data.to_exposure_tables();
    options.exposure_tables = &tables;
  }

  std::vector<SubgroupDef> defs =
      build_subgroups(data, reg, a.subgroup_columns);
  ValidationReport report = km_vs_fitted(fit, reg, defs, options);

  for (const SubgroupComparison& c : report.subgroups) {
    out << "subgroup " << c.name << ": n=" << c.n_subjects
        << ", events=" << c.n_events;
    if (c.zero_events) {
      out << ", no events (skipped)\n";
      continue;
    }
    out << ", sup distance=" << fmt6(c.sup_distance) << ", band("
        << fmt6(100.0 * report.confidence) << "%)=" << fmt6(c.band) << ", "
        << (c.sup_distance <= c.band ? "within band" : "OUTSIDE BAND") << "\n";
  }

  if (!a.report_out.empty()) {
    nlohmann::ordered_json j;
    j["format"] = "fhtreg-validation";
    j["bootstrap_replicates"] = report.bootstrap_replicates;
    j["confidence"] = report.confidence;
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const SubgroupComparison& c : report.subgroups) {
      nlohmann::ordered_json g;
      g["name"] = c.name;
      g["n_subjects"] = c.n_subjects;
      g["n_events"] = c.n_events;
      g["zero_events"] = c.zero_events;
      if (!c.zero_events) {
        g["sup_distance"] = c.sup_distance;
        g["band"] = c.band;
        g["within_band"] = c.sup_distance <= c.band;
      }
      groups.push_back(std::move(g));
    }
    j["subgroups"] = std::move(groups);
    std::ofstream f(a.report_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write report file '" + a.report_out + "'");
    f << j.dump(2) << "\n";
    if (!f) throw std::runtime_error("failed writing report file '" + a.report_out + "'");
  }
  return 0;
}

struct LoglikArgs {
  std::string model_path;
  std::string data_path;
  std::vector<std::string> overrides;
  std::string failure_term = "exact";
};

int run_loglik(const LoglikArgs& a, std::ostream& out) {
  ModelArtifact artifact = load_model(a.model_path);
  Eigen::VectorXd theta = artifact.theta;
  std::vector<std::string> names = artifact.shape.parameter_names();
  for (const std::string& assignment : a.overrides) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects name=value, got '" + assignment + "'");
    std::string name = assignment.substr(0, eq);
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw std::runtime_error("no coefficient named '" + name + "'");
    try {
      std::size_t used = 0;
      std::string value_text = assignment.substr(eq + 1);
      double value = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument(value_text);
      theta[static_cast<int>(it - names.begin())] = value;
    } catch (const std::exception&) {
      throw std::runtime_error("malformed value in '--set " + assignment + "'");
    }
  }
  RegressionSpec spec = artifact.shape.unpack(theta);

  Dataset data = load_dataset(a.data_path);
  double value = 0.0;
  if (data.longitudinal) {
    UncoupledOptions options;
    options.failure_term = parse_failure_term(a.failure_term);
    for (const SubjectRecord& record : data.to_records())
      value += uncoupled_loglik(record, spec, {}, options);
  } else {
    RegressionData reg = data.to_regression();
    if (reg.n_covariates() != artifact.shape.n_covariates)
      throw std::runtime_error(
          "model uses " + std::to_string(artifact.shape.n_covariates) +
          " covariates but the dataset has " +
          std::to_string(reg.n_covariates()));
    value = sample_loglik(reg, spec);
  }
  out << "loglik " << fmt17(value) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"first-hitting-time survival regression toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "draw first-hitting-time data from a parent process");
  simulate->add_option("--process", sim.process,
                       "wiener|gamma|poisson|bernoulli|ou|markov|competing")
      ->required();
  simulate->add_option("--n", sim.n, "number of subjects")->required();
  simulate->add_option("--seed", sim.seed, "random seed")
      ->envname("FHTREG_SEED");
  simulate->add_option("--out", sim.out, "output dataset path ('-' = stdout)");
  simulate->add_option("--mu", sim.mu,
                       "drift per unit time (repeat once per cause for "
                       "--process competing)");
  simulate->add_option("--sigma2", sim.sigma2, "variance per unit time");
  simulate->add_option("--x0", sim.x0, "initial level");
  simulate->add_option("--dt", sim.dt, "simulation step");
  simulate->add_option("--t-max", sim.t_max, "follow-up horizon");
  simulate->add_option("--alpha", sim.alpha, "gamma process shape rate");
  simulate->add_option("--beta", sim.beta, "gamma process scale");
  simulate->add_option("--p-susceptible", sim.p_susceptible,
                       "susceptible fraction for the gamma process");
  simulate->add_option("--grid-step", sim.grid_step,
                       "observation grid step for the gamma process");
  simulate->add_option("--lambda", sim.lambda, "Poisson event rate");
  simulate->add_option("--m", sim.m, "required event count / successes");
  simulate->add_option("--p", sim.p, "Bernoulli success probability");
  simulate->add_option("--theta", sim.theta, "mean-reversion rate");
  simulate->add_option("--equilibrium", sim.equilibrium, "reversion level");
  simulate->add_option("--boundary", sim.boundary,
                       "boundary level for the mean-reverting process");
  simulate->add_option("--absorb", sim.absorb,
                       "per-step absorption probability of the two-state chain");
  simulate->add_option("--max-steps", sim.max_steps,
                       "step horizon for the two-state chain");
  simulate->add_option("--rho", sim.rho,
                       "common cross-correlation between competing causes");

  // fit --------------------------------------------------------------------
  FitArgs fita;
  CLI::App* fitc = app.add_subcommand(
      "fit", "maximum-likelihood fit of the survival regression");
  fitc->add_option("--data", fita.data_path, "dataset path")->required();
  fitc->add_option("--out", fita.model_out, "model artifact output path");
  fitc->add_flag("--cure", fita.cure, "model a non-susceptible fraction");
  fitc->add_flag("--no-exposure", fita.no_exposure,
                 "ignore exposure columns and fit on calendar time");
  fitc->add_option("--starts", fita.starts,
                   "number of optimizer starts (extra starts are perturbed)");
  fitc->add_option("--seed", fita.seed, "seed for perturbed starts")
      ->envname("FHTREG_SEED");
  fitc->add_option("--mu-link", fita.mu_link, "link for the drift (identity)");
  fitc->add_option("--x0-link", fita.x0_link,
                   "link for the starting level (log)");

  // predict ----------------------------------------------------------------
  PredictArgs pred;
  CLI::App* predict = app.add_subcommand(
      "predict", "model survival curves for each covariate row");
  predict->add_option("--model", pred.model_path, "model artifact path")
      ->required();
  predict->add_option("--data", pred.data_path, "covariate rows (dataset path)")
      ->required();
  predict->add_option("--out", pred.out, "output csv path ('-' = stdout)");
  predict->add_option("--grid-max", pred.grid_max,
                      "largest running time on the curve (default: data max)");
  predict->add_option("--grid-points", pred.grid_points,
                      "number of grid intervals");

  // validate ---------------------------------------------------------------
  ValidateArgs val;
  CLI::App* validate = app.add_subcommand(
      "validate", "Kaplan-Meier versus fitted-model comparison");
  validate->add_option("--model", val.model_path, "model artifact path")
      ->required();
  validate->add_option("--data", val.data_path, "dataset path")->required();
  validate->add_option("--out", val.report_out, "json report output path");
  validate->add_option("--subgroup", val.subgroup_columns,
                       "covariate column to median-split into subgroups "
                       "(repeatable)");
  validate->add_option("--bootstrap", val.bootstrap,
                       "parametric bootstrap replicates");
  validate->add_option("--confidence", val.confidence, "band confidence level");
  validate->add_option("--seed", val.seed, "bootstrap seed")
      ->envname("FHTREG_SEED");

  // loglik -----------------------------------------------------------------
  LoglikArgs ll;
  CLI::App* loglik = app.add_subcommand(
      "loglik", "evaluate the model log-likelihood on a dataset");
  loglik->add_option("--model", ll.model_path, "model artifact path")
      ->required();
  loglik->add_option("--data", ll.data_path, "dataset path")->required();
  loglik->add_option("--set", ll.overrides,
                     "override a coefficient, name=value (repeatable)");
  loglik->add_option("--failure-term", ll.failure_term,
                     "terminal failure term for longitudinal records: "
                     "exact|interval");

  std::vector<const char*> argv;
  argv.push_back("fhtreg");
  for (const std::string& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (simulate->parsed()) {
      Dataset data = simulate_dataset(sim);
      OutputTarget target(sim.out, out);
      save_dataset(data, target.stream());
      target.finish();
      return 0;
    }
    if (fitc->parsed()) return run_fit(fita, out);
    if (predict->parsed()) return run_predict(pred, out);
    if (validate->parsed()) return run_validate(val, out);
    if (loglik->parsed()) return run_loglik(ll, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace fhtreg
