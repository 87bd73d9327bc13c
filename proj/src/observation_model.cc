//
// Copyright 2026 The privest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "privest/observation_model.h"

#include <cmath>
#include <string>

#include "privest/errors.h"

namespace privest {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kConsistencyTol = 1e-12;

}  // namespace

SensorSpec::SensorSpec(Eigen::MatrixXd mean, Eigen::MatrixXd active,
                       double failure, double noise_std, ObservationKind k)
    : mean_matrix(std::move(mean)),
      active_matrix(std::move(active)),
      failure_probability(failure),
      obs_noise_std(noise_std),
      kind(k) {
  if (mean_matrix.rows() != active_matrix.rows() ||
      mean_matrix.cols() != active_matrix.cols()) {
    throw ValidationError("mean_matrix and active_matrix shapes differ");
  }
  if (mean_matrix.cols() == 0 || mean_matrix.rows() == 0) {
    throw ValidationError("measurement matrices must be non-empty");
  }
  if (!(failure_probability >= 0.0 && failure_probability <= 1.0)) {
    throw ValidationError("failure_probability must lie in [0,1]");
  }
  if (!(obs_noise_std >= 0.0) || !std::isfinite(obs_noise_std)) {
    throw ValidationError("obs_noise_std must be nonnegative");
  }
  const double gap =
      ((1.0 - failure_probability) * active_matrix - mean_matrix)
          .cwiseAbs()
          .maxCoeff();
  if (gap > kConsistencyTol) {
    throw ValidationError(
        "mean_matrix must equal (1 - failure_probability) * active_matrix");
  }
  if (kind == ObservationKind::kBernoulliEvent &&
      (rows() != 1 || dimension() != 1)) {
    throw ValidationError("Bernoulli event sensors must be scalar");
  }
}

SensorSpec SensorSpec::Reliable(Eigen::MatrixXd matrix, double obs_noise_std) {
  Eigen::MatrixXd copy = matrix;
  return SensorSpec(std::move(matrix), std::move(copy), 0.0, obs_noise_std);
}

Eigen::VectorXd Observe(const SensorSpec& spec, const Eigen::VectorXd& theta,
                        RandomStream& failure, RandomStream& noise) {
  Eigen::VectorXd y(spec.rows());
  ObserveInto(spec, theta, failure, noise, y);
  return y;
}

void ObserveInto(const SensorSpec& spec, const Eigen::VectorXd& theta,
                 RandomStream& failure, RandomStream& noise,
                 Eigen::Ref<Eigen::VectorXd> y) {
  if (theta.size() != spec.dimension()) {
    throw ValidationError("theta has dimension " +
                          std::to_string(theta.size()) + ", sensor expects " +
                          std::to_string(spec.dimension()));
  }
  const bool failed = failure.Bernoulli(spec.failure_probability);
  if (spec.kind == ObservationKind::kBernoulliEvent) {
    const bool event = noise.Bernoulli(theta(0));
    y(0) = (!failed && event) ? spec.active_matrix(0, 0) : 0.0;
    return;
  }
  for (int r = 0; r < spec.rows(); ++r) {
    y(r) = spec.obs_noise_std * noise.StandardNormal();
  }
  if (!failed) y.noalias() += spec.active_matrix * theta;
}

SpectralInfo Spectral(const SensorSpec& spec) {
  SpectralInfo info;
  info.gram = spec.mean_matrix.transpose() * spec.mean_matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(info.gram);
  info.eigenvalues = solver.eigenvalues();
  info.eigenvectors = solver.eigenvectors();
  info.lambda_max = info.eigenvalues.maxCoeff();
  const double tol = kRankTol * info.lambda_max;
  for (Eigen::Index e = 0; e < info.eigenvalues.size(); ++e) {
    const double v = info.eigenvalues(e);
    if (info.lambda_max > 0.0 && v > tol) {
      ++info.rank;
      if (!info.lambda_min_plus || v < *info.lambda_min_plus) {
        info.lambda_min_plus = v;
      }
    }
  }
  return info;
}

bool CooperativeObservability(const std::vector<SensorSpec>& specs) {
  if (specs.empty()) return false;
  const int n = specs.front().dimension();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    if (specs[s].dimension() != n) {
      throw ValidationError("sensor " + std::to_string(s + 1) +
                            " has parameter dimension " +
                            std::to_string(specs[s].dimension()) +
                            ", expected " + std::to_string(n));
    }
    sum.noalias() += specs[s].mean_matrix.transpose() * specs[s].mean_matrix;
  }
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sum,
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double top = ev.maxCoeff();
  return top > 0.0 && ev.minCoeff() > kRankTol * top;
}

}  // namespace privest
