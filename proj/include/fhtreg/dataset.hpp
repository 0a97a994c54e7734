#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fhtreg/longitudinal.hpp"
#include "fhtreg/regression.hpp"
#include "fhtreg/timescale.hpp"

namespace fhtreg {

// One parsed record row.  `line` is the 1-based source line, kept so that
// validation failures and downstream conversions can point at the file.
struct DatasetRow {
  long line = 0;
  std::string id;
  double time = 0.0;
  int event = 0;
  std::optional<double> reading;                   // "x" column
  std::optional<int> cause;                        // "cause" column
  std::vector<std::optional<double>> covariates;   // "z*" columns, file order
  std::vector<double> exposures;                   // "exp_*" columns, file order
};

// A validated rectangular dataset.  Two layouts are accepted:
//
//   * survival layout: one row per subject, `time` > 0, `event` flags failure;
//   * longitudinal layout: several rows per subject, the first at time 0, a
//     failure (if any) only on the last row.  Covariate cells are blank on a
//     failure row because the covariate path is left-continuous and the final
//     visit only records the failure time.
//
// Columns: `id`, `time`, `event` are required; `x` holds process readings,
// `cause` a competing-risk cause label (0 = censored); any column whose name
// starts with `z` is a covariate and any column starting with `exp_` is
// cumulative exposure time in one activity category.  Exposure columns must
// account for the clock: their row sum equals `time` up to 1e-9.
struct Dataset {
  std::vector<std::string> covariate_names;
  std::vector<std::string> exposure_names;
  bool has_reading = false;
  bool has_cause = false;
  bool longitudinal = false;
  std::vector<DatasetRow> rows;  // grouped by subject, file order

  std::size_t n_subjects() const;

  // Survival layout -> regression rows.  An intercept is prepended to the
  // covariate vector, so the design is [1, z...].  Throws on a longitudinal
  // dataset.
  RegressionData to_regression() const;

  // Longitudinal layout -> per-subject records with the same intercept
  // convention on living rows.  Throws on a survival dataset.
  std::vector<SubjectRecord> to_records() const;

  // Per-subject exposure tables (requires exposure columns).  A survival
  // dataset yields two-breakpoint tables {0, time}; a longitudinal dataset
  // uses the visit times as breakpoints, which must then be strictly
  // increasing.
  std::vector<ExposureTable> to_exposure_tables() const;
};

// Parse and fully validate; errors carry "<label> line N: ..." so problems can
// be found in the file.  `load_dataset` reads from disk with the path as label.
Dataset parse_dataset(std::istream& in, const std::string& label);
Dataset load_dataset(const std::string& path);

// Canonical serialization: header in the order id,time,event[,x][,cause],
// z...,exp_..., numbers as %.17g, blank cells for missing values.  Output is
// byte-deterministic for a given dataset.
void save_dataset(const Dataset& data, std::ostream& out);
void save_dataset(const Dataset& data, const std::string& path);

}  // namespace fhtreg
