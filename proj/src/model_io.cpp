#include "fhtreg/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fhtreg {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kFormatTag = "fhtreg-model";
constexpr int kMajorVersion = 1;
constexpr const char* kVersion = "1.0";

int parse_major(const std::string& version) {
  std::size_t dot = version.find('.');
  std::string major = dot == std::string::npos ? version : version.substr(0, dot);
  try {
    return std::stoi(major);
  } catch (const std::exception&) {
    throw std::runtime_error("model artifact has an unreadable version '" +
                             version + "'");
  }
}

ordered_json number_or_null(double value) {
  // JSON has no NaN/inf; the serializer would emit them as null anyway, but
  // doing it explicitly keeps load/save exactly inverse.
  if (!std::isfinite(value)) return nullptr;
  return value;
}

double number_from(const ordered_json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

RegressionSpec ModelArtifact::spec() const { return shape.unpack(theta); }

ModelArtifact make_artifact(const FitResult& fit, std::uint64_t seed) {
  ModelArtifact a;
  a.shape = fit.shape;
  a.theta = fit.theta;
  a.stderr_theta = fit.stderr_theta;
  a.covariance = fit.covariance;
  a.loglik = fit.loglik;
  a.converged = fit.converged;
  a.singular_information = fit.singular_information;
  a.iterations = fit.iterations;
  a.seed = seed;
  a.warnings = fit.warnings;
  return a;
}

std::string serialize_model(const ModelArtifact& artifact) {
  const ModelShape& shape = artifact.shape;
  if (artifact.theta.size() != shape.dim())
    throw std::invalid_argument(
        "model artifact coefficient vector does not match its shape");

  ordered_json j;
  j["format"] = kFormatTag;
  j["version"] = kVersion;
  j["model"] = {{"n_covariates", shape.n_covariates},
                {"cure", shape.cure},
                {"n_exposure", shape.n_exposure}};

  std::vector<std::string> names = shape.parameter_names();
  ordered_json coef = ordered_json::array();
  for (int i = 0; i < shape.dim(); ++i) {
    ordered_json entry;
    entry["name"] = names[static_cast<std::size_t>(i)];
    entry["estimate"] = number_or_null(artifact.theta[i]);
    entry["stderr"] = artifact.stderr_theta.size() == shape.dim()
                          ? number_or_null(artifact.stderr_theta[i])
                          : ordered_json(nullptr);
    coef.push_back(std::move(entry));
  }
  j["coefficients"] = std::move(coef);

  if (artifact.covariance.rows() == shape.dim() &&
      artifact.covariance.cols() == shape.dim()) {
    ordered_json cov = ordered_json::array();
    for (int r = 0; r < shape.dim(); ++r) {
      ordered_json row = ordered_json::array();
      for (int c = 0; c < shape.dim(); ++c)
        row.push_back(number_or_null(artifact.covariance(r, c)));
      cov.push_back(std::move(row));
    }
    j["covariance"] = std::move(cov);
  } else {
    j["covariance"] = nullptr;
  }

  j["loglik"] = number_or_null(artifact.loglik);
  j["converged"] = artifact.converged;
  j["singular_information"] = artifact.singular_information;
  j["iterations"] = artifact.iterations;
  j["seed"] = artifact.seed;
  j["warnings"] = artifact.warnings;
  return j.dump(2) + "\n";
}

ModelArtifact deserialize_model(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model artifact is corrupt: ") +
                             e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kFormatTag)
      throw std::runtime_error("file is not a model artifact");
    std::string version = j.at("version").get<std::string>();
    if (parse_major(version) != kMajorVersion)
      throw std::runtime_error("model artifact version '" + version +
                               "' is unsupported (this tool reads major version " +
                               std::to_string(kMajorVersion) + ")");

    ModelArtifact a;
    const ordered_json& model = j.at("model");
    a.shape.n_covariates = model.at("n_covariates").get<int>();
    a.shape.cure = model.at("cure").get<bool>();
    a.shape.n_exposure = model.at("n_exposure").get<int>();
    if (a.shape.n_covariates < 0 || a.shape.n_exposure < 0)
      throw std::runtime_error("model artifact has a negative dimension");

    int dim = a.shape.dim();
    const ordered_json& coef = j.at("coefficients");
    if (static_cast<int>(coef.size()) != dim)
      throw std::runtime_error(
          "model artifact coefficient count does not match its shape");
    std::vector<std::string> names = a.shape.parameter_names();
    a.theta = Eigen::VectorXd(dim);
    a.stderr_theta = Eigen::VectorXd(dim);
    for (int i = 0; i < dim; ++i) {
      const ordered_json& entry = coef[static_cast<std::size_t>(i)];
      if (entry.at("name").get<std::string>() != names[static_cast<std::size_t>(i)])
        throw std::runtime_error("model artifact coefficient '" +
                                 entry.at("name").get<std::string>() +
                                 "' is out of place");
      a.theta[i] = number_from(entry.at("estimate"));
      a.stderr_theta[i] = number_from(entry.at("stderr"));
    }

    const ordered_json& cov = j.at("covariance");
    if (!cov.is_null()) {
      if (static_cast<int>(cov.size()) != dim)
        throw std::runtime_error("model artifact covariance has wrong size");
      a.covariance = Eigen::MatrixXd(dim, dim);
      for (int r = 0; r < dim; ++r) {
        const ordered_json& row = cov[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) != dim)
          throw std::runtime_error("model artifact covariance has wrong size");
        for (int c = 0; c < dim; ++c)
          a.covariance(r, c) = number_from(row[static_cast<std::size_t>(c)]);
      }
    }

    a.loglik = number_from(j.at("loglik"));
    a.converged = j.at("converged").get<bool>();
    a.singular_information = j.at("singular_information").get<bool>();
    a.iterations = j.at("iterations").get<int>();
    a.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& w : j.at("warnings"))
      a.warnings.push_back(w.get<std::string>());
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model artifact is corrupt: ") +
                             e.what());
  }
}

void save_model(const ModelArtifact& artifact, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << serialize_model(artifact);
  if (!out) throw std::runtime_error("failed writing model file '" + path + "'");
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace fhtreg
