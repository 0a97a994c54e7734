#include "fhtreg/dataset.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fhtreg {

namespace {

constexpr double kAccountingTol = 1e-9;

[[noreturn]] void fail(const std::string& label, long line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << label << " line " << line << ": " << what;
  throw std::runtime_error(msg.str());
}

[[noreturn]] void fail(const std::string& label, const std::string& what) {
  throw std::runtime_error(label + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double(const std::string& field, const std::string& label,
                    long line, const std::string& column) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
    fail(label, line, "column '" + column + "' has a malformed number '" +
                          field + "'");
  }
  return value;
}

int parse_int(const std::string& field, const std::string& label, long line,
              const std::string& column) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  long value = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    fail(label, line, "column '" + column + "' has a malformed integer '" +
                          field + "'");
  }
  return static_cast<int>(value);
}

std::string fmt_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// Column layout discovered from the header.
struct Header {
  int id = -1;
  int time = -1;
  int event = -1;
  int reading = -1;
  int cause = -1;
  std::vector<int> covariates;
  std::vector<int> exposures;
  std::vector<std::string> covariate_names;
  std::vector<std::string> exposure_names;
  std::size_t n_columns = 0;
};

Header parse_header(const std::string& line, const std::string& label) {
  Header h;
  std::vector<std::string> names = split_fields(line);
  h.n_columns = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& name = names[i];
    int idx = static_cast<int>(i);
    auto claim = [&](int& slot) {
      if (slot >= 0) fail(label, 1, "duplicate column '" + name + "'");
      slot = idx;
    };
    if (name == "id") {
      claim(h.id);
    } else if (name == "time") {
      claim(h.time);
    } else if (name == "event") {
      claim(h.event);
    } else if (name == "x") {
      claim(h.reading);
    } else if (name == "cause") {
      claim(h.cause);
    } else if (name.rfind("exp_", 0) == 0) {
      if (name.size() == 4) fail(label, 1, "exposure column needs a name after 'exp_'");
      for (const std::string& seen : h.exposure_names)
        if (seen == name) fail(label, 1, "duplicate column '" + name + "'");
      h.exposures.push_back(idx);
      h.exposure_names.push_back(name);
    } else if (!name.empty() && name[0] == 'z') {
      for (const std::string& seen : h.covariate_names)
        if (seen == name) fail(label, 1, "duplicate column '" + name + "'");
      h.covariates.push_back(idx);
      h.covariate_names.push_back(name);
    } else {
      fail(label, 1,
           "unrecognized column '" + name +
               "' (expected id/time/event/x/cause, z* covariates, or exp_* "
               "exposures)");
    }
  }
  if (h.id < 0) fail(label, 1, "missing required column 'id'");
  if (h.time < 0) fail(label, 1, "missing required column 'time'");
  if (h.event < 0) fail(label, 1, "missing required column 'event'");
  return h;
}

// Per-subject validation shared by the two layouts.
void validate_subject(const Dataset& data, std::size_t first, std::size_t last,
                      const std::string& label) {
  const DatasetRow& head = data.rows[first];
  std::size_t n_rows = last - first + 1;

  if (!data.longitudinal) {
    // Survival layout: one positive-time row, complete covariates.
    const DatasetRow& row = head;
    if (row.time <= 0.0)
      fail(label, row.line, "subject '" + row.id + "': time must be positive");
    for (std::size_t j = 0; j < row.covariates.size(); ++j) {
      if (!row.covariates[j].has_value())
        fail(label, row.line,
             "subject '" + row.id + "': covariate '" +
                 data.covariate_names[j] + "' is missing");
    }
    return;
  }

  // Longitudinal layout.
  if (head.time != 0.0)
    fail(label, head.line,
         "subject '" + head.id + "': first visit must be at time 0");
  if (head.event != 0)
    fail(label, head.line,
         "subject '" + head.id + "': failure at the entry visit");
  int n_readings = 0;
  int n_living = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const DatasetRow& row = data.rows[i];
    if (i > first && row.time < data.rows[i - 1].time)
      fail(label, row.line,
           "subject '" + row.id + "': visit times decrease");
    if (row.event != 0 && i != last)
      fail(label, row.line,
           "subject '" + row.id + "': failure before the last visit");
    if (row.event != 0) {
      // Failure row: covariates and readings are not recorded.
      for (std::size_t j = 0; j < row.covariates.size(); ++j) {
        if (row.covariates[j].has_value())
          fail(label, row.line,
               "subject '" + row.id + "': covariate '" +
                   data.covariate_names[j] +
                   "' must be blank on a failure row");
      }
      if (row.reading.has_value())
        fail(label, row.line,
             "subject '" + row.id + "': reading must be blank on a failure row");
    } else {
      ++n_living;
      for (std::size_t j = 0; j < row.covariates.size(); ++j) {
        if (!row.covariates[j].has_value())
          fail(label, row.line,
               "subject '" + row.id + "': covariate '" +
                   data.covariate_names[j] + "' is missing on a living visit");
      }
      if (row.reading.has_value()) {
        ++n_readings;
        if (*row.reading <= 0.0)
          fail(label, row.line,
               "subject '" + row.id + "': process reading must be positive");
      }
    }
  }
  if (n_readings != 0 && n_readings != n_living)
    fail(label, head.line,
         "subject '" + head.id +
             "': process readings must appear at every living visit or none");
  if (n_rows == 1) {
    // A lone baseline row carries no information but is tolerated; anything
    // else single-row in a longitudinal file is a truncated record.
    // (head.time == 0 and head.event == 0 are already enforced above.)
  }
}

void validate_exposures(const Dataset& data, std::size_t first,
                        std::size_t last, const std::string& label) {
  if (data.exposure_names.empty()) return;
  for (std::size_t i = first; i <= last; ++i) {
    const DatasetRow& row = data.rows[i];
    double total = 0.0;
    for (std::size_t j = 0; j < row.exposures.size(); ++j) {
      double v = row.exposures[j];
      if (v < 0.0)
        fail(label, row.line,
             "exposure '" + data.exposure_names[j] + "' is negative");
      if (i > first && v < data.rows[i - 1].exposures[j] - kAccountingTol)
        fail(label, row.line,
             "exposure '" + data.exposure_names[j] +
                 "' decreases between visits");
      total += v;
    }
    if (std::fabs(total - row.time) > kAccountingTol) {
      std::ostringstream msg;
      msg << "exposures sum to " << total << " but time is " << row.time
          << " (the categories must account for the whole clock)";
      fail(label, row.line, msg.str());
    }
  }
}

}  // namespace

std::size_t Dataset::n_subjects() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i == 0 || rows[i].id != rows[i - 1].id) ++n;
  return n;
}

Dataset parse_dataset(std::istream& in, const std::string& label) {
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) fail(label, "empty file (no header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Header h = parse_header(line, label);
  data.covariate_names = h.covariate_names;
  data.exposure_names = h.exposure_names;
  data.has_reading = h.reading >= 0;
  data.has_cause = h.cause >= 0;

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != h.n_columns) {
      std::ostringstream msg;
      msg << "expected " << h.n_columns << " fields but found "
          << fields.size();
      fail(label, line_no, msg.str());
    }
    DatasetRow row;
    row.line = line_no;
    row.id = fields[h.id];
    if (row.id.empty()) fail(label, line_no, "column 'id' is empty");
    row.time = parse_double(fields[h.time], label, line_no, "time");
    if (row.time < 0.0) fail(label, line_no, "column 'time' is negative");
    row.event = parse_int(fields[h.event], label, line_no, "event");
    if (row.event != 0 && row.event != 1)
      fail(label, line_no, "column 'event' must be 0 or 1");
    if (h.reading >= 0 && !fields[h.reading].empty())
      row.reading = parse_double(fields[h.reading], label, line_no, "x");
    if (h.cause >= 0) {
      if (fields[h.cause].empty())
        fail(label, line_no, "column 'cause' is empty");
      row.cause = parse_int(fields[h.cause], label, line_no, "cause");
      if (*row.cause < 0)
        fail(label, line_no, "column 'cause' must be nonnegative");
      if ((row.event == 1) != (*row.cause > 0))
        fail(label, line_no,
             "columns 'event' and 'cause' disagree (cause 0 means censored)");
    }
    for (std::size_t j = 0; j < h.covariates.size(); ++j) {
      const std::string& field = fields[h.covariates[j]];
      if (field.empty())
        row.covariates.push_back(std::nullopt);
      else
        row.covariates.push_back(
            parse_double(field, label, line_no, h.covariate_names[j]));
    }
    for (std::size_t j = 0; j < h.exposures.size(); ++j) {
      const std::string& field = fields[h.exposures[j]];
      if (field.empty())
        fail(label, line_no,
             "exposure '" + h.exposure_names[j] + "' is empty");
      row.exposures.push_back(
          parse_double(field, label, line_no, h.exposure_names[j]));
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) fail(label, "no data rows");

  // Group rows by subject and insist the groups are contiguous, so record
  // order within a subject is unambiguous.
  std::unordered_map<std::string, std::size_t> last_seen;
  std::size_t max_rows = 1;
  std::size_t group_start = 0;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const DatasetRow& row = data.rows[i];
    auto it = last_seen.find(row.id);
    if (it != last_seen.end() && it->second != i - 1)
      fail(label, row.line,
           "rows for subject '" + row.id + "' are not adjacent");
    if (it == last_seen.end() || it->second != i - 1) group_start = i;
    last_seen[row.id] = i;
    max_rows = std::max(max_rows, i - group_start + 1);
  }
  data.longitudinal = max_rows > 1;

  for (std::size_t first = 0; first < data.rows.size();) {
    std::size_t last = first;
    while (last + 1 < data.rows.size() &&
           data.rows[last + 1].id == data.rows[first].id)
      ++last;
    validate_subject(data, first, last, label);
    validate_exposures(data, first, last, label);
    first = last + 1;
  }
  return data;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
  return parse_dataset(in, path);
}

RegressionData Dataset::to_regression() const {
  if (longitudinal)
    throw std::runtime_error(
        "longitudinal records cannot be flattened into survival rows; use "
        "the record interface");
  RegressionData out;
  out.rows.reserve(rows.size());
  for (const DatasetRow& row : rows) {
    SurvivalRow s;
    s.id = row.id;
    s.time = row.time;
    s.failed = row.event != 0;
    s.z = Eigen::VectorXd(1 + static_cast<int>(covariate_names.size()));
    s.z[0] = 1.0;
    for (std::size_t j = 0; j < row.covariates.size(); ++j)
      s.z[1 + static_cast<int>(j)] = *row.covariates[j];
    if (!exposure_names.empty()) {
      s.occupancy = Eigen::VectorXd(static_cast<int>(exposure_names.size()));
      for (std::size_t j = 0; j < row.exposures.size(); ++j)
        s.occupancy[static_cast<int>(j)] = row.exposures[j];
    }
    out.rows.push_back(std::move(s));
  }
  return out;
}

std::vector<SubjectRecord> Dataset::to_records() const {
  if (!longitudinal)
    throw std::runtime_error(
        "survival rows do not form longitudinal records; each subject needs "
        "a visit history starting at time 0");
  std::vector<SubjectRecord> out;
  for (std::size_t first = 0; first < rows.size();) {
    std::size_t last = first;
    while (last + 1 < rows.size() && rows[last + 1].id == rows[first].id)
      ++last;
    SubjectRecord rec;
    rec.id = rows[first].id;
    for (std::size_t i = first; i <= last; ++i) {
      const DatasetRow& row = rows[i];
      Observation obs;
      obs.time = row.time;
      obs.failed = row.event != 0;
      obs.reading = row.reading;
      if (!obs.failed) {
        obs.z = Eigen::VectorXd(1 + static_cast<int>(covariate_names.size()));
        obs.z[0] = 1.0;
        for (std::size_t j = 0; j < row.covariates.size(); ++j)
          obs.z[1 + static_cast<int>(j)] = *row.covariates[j];
      }
      rec.obs.push_back(std::move(obs));
    }
    rec.validate();
    out.push_back(std::move(rec));
    first = last + 1;
  }
  return out;
}

std::vector<ExposureTable> Dataset::to_exposure_tables() const {
  if (exposure_names.empty())
    throw std::runtime_error("dataset has no exposure columns");
  int n_cat = static_cast<int>(exposure_names.size());
  std::vector<ExposureTable> out;
  for (std::size_t first = 0; first < rows.size();) {
    std::size_t last = first;
    while (last + 1 < rows.size() && rows[last + 1].id == rows[first].id)
      ++last;
    ExposureTable table;
    if (!longitudinal) {
      const DatasetRow& row = rows[first];
      table.times = {0.0, row.time};
      table.cum = Eigen::MatrixXd::Zero(2, n_cat);
      for (int j = 0; j < n_cat; ++j) table.cum(1, j) = row.exposures[j];
    } else {
      std::size_t n = last - first + 1;
      table.times.resize(n);
      table.cum = Eigen::MatrixXd(static_cast<int>(n), n_cat);
      for (std::size_t i = first; i <= last; ++i) {
        if (i > first && rows[i].time <= rows[i - 1].time)
          throw std::runtime_error(
              "subject '" + rows[first].id +
              "': exposure breakpoints need strictly increasing visit times");
        table.times[i - first] = rows[i].time;
        for (int j = 0; j < n_cat; ++j)
          table.cum(static_cast<int>(i - first), j) = rows[i].exposures[j];
      }
    }
    table.validate();
    out.push_back(std::move(table));
    first = last + 1;
  }
  return out;
}

void save_dataset(const Dataset& data, std::ostream& out) {
  out << "id,time,event";
  if (data.has_reading) out << ",x";
  if (data.has_cause) out << ",cause";
  for (const std::string& name : data.covariate_names) out << ',' << name;
  for (const std::string& name : data.exposure_names) out << ',' << name;
  out << '\n';
  for (const DatasetRow& row : data.rows) {
    out << row.id << ',' << fmt_double(row.time) << ',' << row.event;
    if (data.has_reading) {
      out << ',';
      if (row.reading.has_value()) out << fmt_double(*row.reading);
    }
    if (data.has_cause) {
      out << ',';
      if (row.cause.has_value()) out << *row.cause;
    }
    for (const auto& value : row.covariates) {
      out << ',';
      if (value.has_value()) out << fmt_double(*value);
    }
    for (double value : row.exposures) out << ',' << fmt_double(value);
    out << '\n';
  }
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file '" + path + "'");
  save_dataset(data, out);
  if (!out) throw std::runtime_error("failed writing dataset file '" + path + "'");
}

}  // namespace fhtreg
