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

#ifndef PRIVEST_OBSERVATION_MODEL_H_
#define PRIVEST_OBSERVATION_MODEL_H_

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "privest/random.h"

namespace privest {

enum class ObservationKind {
  // y = H theta + w, H in {0, active_matrix}, w Gaussian.
  kLinearGaussian,
  // Scalar event indicator: with probability 1 - failure_probability the
  // sensor has a participant and y ~ Bernoulli(theta); otherwise y = 0.
  kBernoulliEvent,
};

// A sensor with the Bernoulli failure model: H_k = 0 with probability
// failure_probability, H_k = active_matrix otherwise. mean_matrix must equal
// (1 - failure_probability) * active_matrix.
struct SensorSpec {
  SensorSpec(Eigen::MatrixXd mean_matrix, Eigen::MatrixXd active_matrix,
             double failure_probability, double obs_noise_std,
             ObservationKind kind = ObservationKind::kLinearGaussian);

  // Shorthand for a sensor that never fails.
  static SensorSpec Reliable(Eigen::MatrixXd matrix, double obs_noise_std);

  int rows() const { return static_cast<int>(mean_matrix.rows()); }
  int dimension() const { return static_cast<int>(mean_matrix.cols()); }

  Eigen::MatrixXd mean_matrix;
  Eigen::MatrixXd active_matrix;
  double failure_probability;
  double obs_noise_std;
  ObservationKind kind;
};

struct SpectralInfo {
  Eigen::MatrixXd gram;  // Q = Hbar^T Hbar
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;
  // Smallest eigenvalue above the rank tolerance; empty when rank is 0.
  std::optional<double> lambda_min_plus;
  double lambda_max = 0.0;
  int rank = 0;
};

// One observation y_{i,k}. Consumes one draw from `failure` and rows() draws
// from `noise` regardless of the failure outcome.
Eigen::VectorXd Observe(const SensorSpec& spec, const Eigen::VectorXd& theta,
                        RandomStream& failure, RandomStream& noise);
// Allocation-free variant; `out` must have rows() entries.
void ObserveInto(const SensorSpec& spec, const Eigen::VectorXd& theta,
                 RandomStream& failure, RandomStream& noise,
                 Eigen::Ref<Eigen::VectorXd> out);

// Eigen-decomposition of Hbar^T Hbar; eigenvalues below 1e-10 * lambda_max
// count as zero.
SpectralInfo Spectral(const SensorSpec& spec);

// True iff sum_i Hbar_i^T Hbar_i has full rank. Throws ValidationError when
// sensors disagree on the parameter dimension.
bool CooperativeObservability(const std::vector<SensorSpec>& specs);

}  // namespace privest

#endif  // PRIVEST_OBSERVATION_MODEL_H_
