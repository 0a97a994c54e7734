#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fhtreg/cli.hpp"
#include "fhtreg/dataset.hpp"

using namespace fhtreg;
using doctest::Contains;

namespace {

struct CliRun {
  int status = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun result;
  result.status = run_cli(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string line_with_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return line;
  }
  return {};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("--version prints the tool banner") {
  const CliRun r = run({"--version"});
  CHECK(r.status == 0);
  CHECK(r.out == "fhtreg 1.0\n");
}

TEST_CASE("bad invocations exit nonzero with a diagnostic") {
  CHECK(run({}).status != 0);
  const CliRun unknown = run({"simulate", "--process", "wiener", "--mu", "-1",
                              "--n", "5", "--frobnicate"});
  CHECK(unknown.status != 0);
  CHECK(unknown.err.find("frobnicate") != std::string::npos);
  const CliRun missing = run({"simulate", "--process", "wiener"});
  CHECK(missing.status != 0);  // --n is required
  const CliRun badproc = run({"simulate", "--process", "weiner", "--n", "5"});
  CHECK(badproc.status != 0);
  CHECK(badproc.err.find("unknown --process") != std::string::npos);
  const CliRun nosub = run({"frobnicate"});
  CHECK(nosub.status != 0);
}

TEST_CASE("simulate is byte-reproducible for every process family") {
  const std::vector<std::vector<std::string>> invocations = {
      {"simulate", "--process", "wiener", "--mu", "-1", "--x0", "1", "--n",
       "40", "--seed", "7", "--dt", "0.05", "--t-max", "30"},
      {"simulate", "--process", "gamma", "--alpha", "2", "--beta", "0.5",
       "--x0", "4", "--n", "25", "--seed", "11", "--grid-step", "0.1",
       "--t-max", "20"},
      {"simulate", "--process", "poisson", "--lambda", "1.5", "--m", "3",
       "--n", "30", "--seed", "13"},
      {"simulate", "--process", "bernoulli", "--p", "0.3", "--m", "2", "--n",
       "30", "--seed", "17"},
      {"simulate", "--process", "ou", "--theta", "0.5", "--equilibrium", "2",
       "--x0", "1", "--boundary", "0", "--n", "10", "--seed", "19", "--dt",
       "0.01", "--t-max", "20"},
      {"simulate", "--process", "markov", "--absorb", "0.25", "--n", "35",
       "--seed", "23"},
  };
  for (const auto& args : invocations) {
    CAPTURE(args[2]);
    const CliRun first = run(args);
    const CliRun second = run(args);
    CHECK(first.status == 0);
    CHECK(first.err.empty());
    CHECK(first.out == second.out);
    CHECK(first.out.rfind("id,time,event\n", 0) == 0);
  }
}

TEST_CASE("simulate competing emits a cause column, reproducibly") {
  const std::vector<std::string> args = {
      "simulate", "--process", "competing", "--mu", "-1",   "--mu",
      "-0.5",     "--x0",      "1",         "--n",  "30",   "--seed",
      "3",        "--dt",      "0.05",      "--t-max", "15", "--rho", "0.3"};
  const CliRun first = run(args);
  const CliRun second = run(args);
  REQUIRE(first.status == 0);
  CHECK(first.out == second.out);
  CHECK(first.out.rfind("id,time,event,cause\n", 0) == 0);

  std::istringstream in(first.out);
  const Dataset data = parse_dataset(in, "simulated");
  CHECK(data.has_cause);
  CHECK(data.rows.size() == 30);
  for (const DatasetRow& row : data.rows) {
    REQUIRE(row.cause.has_value());
    CHECK(*row.cause >= 0);
    CHECK(*row.cause <= 2);
    CHECK((row.event == 1) == (*row.cause > 0));
  }
}

TEST_CASE("simulate writes the same bytes to a file as to the stream") {
  const std::string path = "cli_sim_file.csv";
  const std::vector<std::string> base = {"simulate", "--process", "wiener",
                                         "--mu", "-0.8", "--n", "20", "--seed",
                                         "5", "--dt", "0.05", "--t-max", "25"};
  const CliRun to_stream = run(base);
  std::vector<std::string> to_file = base;
  to_file.insert(to_file.end(), {"--out", path});
  const CliRun filed = run(to_file);
  REQUIRE(filed.status == 0);
  CHECK(filed.out.empty());
  CHECK(read_text(path) == to_stream.out);
  std::remove(path.c_str());
}

TEST_CASE("the seed environment variable stands in for --seed") {
  const std::vector<std::string> base = {"simulate", "--process", "wiener",
                                         "--mu", "-1", "--n", "10", "--dt",
                                         "0.05", "--t-max", "20"};
  std::vector<std::string> seeded = base;
  seeded.insert(seeded.end(), {"--seed", "29"});
  const CliRun explicit_seed = run(seeded);

  REQUIRE(setenv("FHTREG_SEED", "29", 1) == 0);
  const CliRun env_seed = run(base);
  REQUIRE(unsetenv("FHTREG_SEED") == 0);
  CHECK(env_seed.status == 0);
  CHECK(env_seed.out == explicit_seed.out);
}

TEST_CASE("fit, loglik, predict, and validate chain through shared files") {
  const std::string data_path = "cli_pipe_data.csv";
  const std::string model_path = "cli_pipe_model.json";

  REQUIRE(run({"simulate", "--process", "wiener", "--mu", "-0.9", "--x0", "1.5",
               "--n", "150", "--seed", "31", "--dt", "0.02", "--t-max", "40",
               "--out", data_path})
              .status == 0);

  const CliRun fit1 = run({"fit", "--data", data_path, "--out", model_path});
  REQUIRE(fit1.status == 0);
  CHECK(fit1.out.find("converged yes") != std::string::npos);
  CHECK(line_with_prefix(fit1.out, "subjects ") == "subjects 150, events 150");
  const std::string fit_loglik = line_with_prefix(fit1.out, "loglik ");
  REQUIRE(!fit_loglik.empty());

  // the fit is deterministic: run it again and compare every byte
  const CliRun fit2 = run({"fit", "--data", data_path});
  CHECK(fit2.out == fit1.out);

  // loglik at the saved coefficients reproduces the printed value exactly
  const CliRun ll = run({"loglik", "--model", model_path, "--data", data_path});
  REQUIRE(ll.status == 0);
  CHECK(line_with_prefix(ll.out, "loglik ") == fit_loglik);

  // overriding a coefficient moves the value off the maximum
  const CliRun worse = run({"loglik", "--model", model_path, "--data",
                            data_path, "--set", "beta_0=0.5"});
  REQUIRE(worse.status == 0);
  CHECK(line_with_prefix(worse.out, "loglik ") != fit_loglik);
  const CliRun badname = run({"loglik", "--model", model_path, "--data",
                              data_path, "--set", "zeta_0=1"});
  CHECK(badname.status != 0);
  CHECK(badname.err.find("no coefficient named 'zeta_0'") != std::string::npos);
  const CliRun badvalue = run({"loglik", "--model", model_path, "--data",
                               data_path, "--set", "beta_0=abc"});
  CHECK(badvalue.status != 0);
  CHECK(badvalue.err.find("malformed value") != std::string::npos);

  // predict: survival curves start at 1 and never increase
  const CliRun pred = run({"predict", "--model", model_path, "--data",
                           data_path, "--grid-max", "6", "--grid-points", "8"});
  REQUIRE(pred.status == 0);
  std::istringstream lines(pred.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "id,r,survival");
  std::string prev_id;
  double prev_surv = 2.0;
  long rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    const std::string id = line.substr(0, c1);
    const double r = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double surv = std::stod(line.substr(c2 + 1));
    if (id != prev_id) {
      CHECK(r == 0.0);
      CHECK(surv == 1.0);
    } else {
      CHECK(surv <= prev_surv);
    }
    prev_id = id;
    prev_surv = surv;
  }
  CHECK(rows == 150 * 9);
  const CliRun pred2 = run({"predict", "--model", model_path, "--data",
                            data_path, "--grid-max", "6", "--grid-points", "8"});
  CHECK(pred2.out == pred.out);

  // validate: deterministic under a fixed seed, and the report file appears
  const std::string report_path = "cli_pipe_report.json";
  const std::vector<std::string> val_args = {
      "validate", "--model", model_path,  "--data", data_path,
      "--bootstrap", "7",    "--seed",    "41",     "--out", report_path};
  const CliRun val1 = run(val_args);
  REQUIRE(val1.status == 0);
  CHECK(val1.out.find("subgroup all: n=150, events=150") != std::string::npos);
  const std::string report1 = read_text(report_path);
  const CliRun val2 = run(val_args);
  CHECK(val2.out == val1.out);
  CHECK(read_text(report_path) == report1);
  CHECK(report1.find("\"fhtreg-validation\"") != std::string::npos);

  std::remove(data_path.c_str());
  std::remove(model_path.c_str());
  std::remove(report_path.c_str());
}

TEST_CASE("fit --cure refuses event-free data") {
  const std::string path = "cli_no_events.csv";
  write_text(path,
             "id,time,event\n"
             "s1,1,0\n"
             "s2,2,0\n"
             "s3,1.5,0\n");
  const CliRun r = run({"fit", "--data", path, "--cure"});
  CHECK(r.status != 0);
  CHECK(r.err.find("susceptibility fraction is not identified") !=
        std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("only the documented link choices are accepted") {
  const std::string path = "cli_links.csv";
  write_text(path, "id,time,event\ns1,1,1\ns2,2,1\ns3,1.5,0\n");
  CHECK(run({"fit", "--data", path, "--mu-link", "identity", "--x0-link",
             "log"})
            .status == 0);
  const CliRun bad = run({"fit", "--data", path, "--mu-link", "log"});
  CHECK(bad.status != 0);
  CHECK(bad.err.find("identity link") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("loglik handles longitudinal records and the failure-term choice") {
  const std::string data_path = "cli_longitudinal.csv";
  const std::string survival_path = "cli_longi_base.csv";
  const std::string model_path = "cli_longi_model.json";
  write_text(data_path,
             "id,time,event\n"
             "a,0,0\n"
             "a,1,0\n"
             "a,2,1\n"
             "b,0,0\n"
             "b,1.5,0\n");
  REQUIRE(run({"simulate", "--process", "wiener", "--mu", "-0.8", "--n", "80",
               "--seed", "43", "--dt", "0.05", "--t-max", "30", "--out",
               survival_path})
              .status == 0);
  REQUIRE(run({"fit", "--data", survival_path, "--out", model_path}).status ==
          0);

  const CliRun exact = run({"loglik", "--model", model_path, "--data",
                            data_path, "--failure-term", "exact"});
  REQUIRE(exact.status == 0);
  const CliRun interval = run({"loglik", "--model", model_path, "--data",
                               data_path, "--failure-term", "interval"});
  REQUIRE(interval.status == 0);
  CHECK(line_with_prefix(exact.out, "loglik ") !=
        line_with_prefix(interval.out, "loglik "));
  const CliRun bad = run({"loglik", "--model", model_path, "--data", data_path,
                          "--failure-term", "sometimes"});
  CHECK(bad.status != 0);
  CHECK(bad.err.find("'exact' or 'interval'") != std::string::npos);

  std::remove(data_path.c_str());
  std::remove(survival_path.c_str());
  std::remove(model_path.c_str());
}

TEST_CASE("predict refuses an artifact that records a failed fit") {
  const std::string data_path = "cli_refuse_data.csv";
  const std::string model_path = "cli_refuse_model.json";
  REQUIRE(run({"simulate", "--process", "wiener", "--mu", "-0.7", "--n", "60",
               "--seed", "47", "--dt", "0.05", "--t-max", "30", "--out",
               data_path})
              .status == 0);
  REQUIRE(run({"fit", "--data", data_path, "--out", model_path}).status == 0);
  std::string text = read_text(model_path);
  const std::size_t at = text.find("\"converged\": true");
  REQUIRE(at != std::string::npos);
  text.replace(at, std::string("\"converged\": true").size(),
               "\"converged\": false");
  write_text(model_path, text);
  const CliRun pred = run({"predict", "--model", model_path, "--data", data_path});
  CHECK(pred.status != 0);
  CHECK(pred.err.find("refusing to predict") != std::string::npos);
  const CliRun val = run({"validate", "--model", model_path, "--data",
                          data_path, "--bootstrap", "3"});
  CHECK(val.status != 0);
  CHECK(val.err.find("refusing to validate") != std::string::npos);
  std::remove(data_path.c_str());
  std::remove(model_path.c_str());
}
