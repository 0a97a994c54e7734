#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fhtreg/regression.hpp"

namespace fhtreg {

/// A fitted model in portable form: the free-parameter layout, estimates
/// with standard errors, the curvature-based covariance when available, and
/// the fit diagnostics. `seed` echoes the seed used by whatever produced
/// the fit so a run can be reproduced from the artifact alone.
struct ModelArtifact {
  ModelShape shape;
  Eigen::VectorXd theta;
  Eigen::VectorXd stderr_theta;  // NaN entries when information is singular
  Eigen::MatrixXd covariance;    // 0x0 when unavailable
  double loglik = 0.0;
  bool converged = false;
  bool singular_information = false;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  RegressionSpec spec() const;
};

ModelArtifact make_artifact(const FitResult& fit, std::uint64_t seed);

/// JSON serialization with a fixed field order and shortest-round-trip
/// number formatting, so serialize(deserialize(text)) == text for any
/// artifact this library wrote. Non-finite values are stored as null.
std::string serialize_model(const ModelArtifact& artifact);

/// Parses and checks an artifact. A file written by a newer major format
/// version, a truncated file, or a file of the wrong shape is rejected with
/// a message saying which.
ModelArtifact deserialize_model(const std::string& text);

void save_model(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_model(const std::string& path);

}  // namespace fhtreg
