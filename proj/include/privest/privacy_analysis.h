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

// Fisher-information upper bounds on what the transmitted bits reveal about
// a sensor's observation, plus the diagnostics used to check their decay.

#ifndef PRIVEST_PRIVACY_ANALYSIS_H_
#define PRIVEST_PRIVACY_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "privest/estimator.h"
#include "privest/noise_models.h"

namespace privest {

struct PrivacyNeighbor {
  int neighbor = -1;
  // Sum of pi_u over the topologies containing the edge.
  double q_stationary = 0.0;
  // q_{ij,1..K} from the chain recursion; empty means q is the stationary
  // constant. Times past the end fall back to q_stationary.
  std::vector<double> q_series;
  NoiseSchedule noise{NoiseFamily::kGaussian, 1.0, 0.0};

  double q(std::int64_t t) const;
};

struct FisherBoundConfig {
  int sensor = 0;
  std::vector<PrivacyNeighbor> neighbors;
  SensorStepSize beta;
  // Smallest positive eigenvalue of Q_i; 0 when H_bar = 0.
  double lambda_min_plus = 0.0;
  double lambda_max = 0.0;
  // n x n matrix multiplying every bound. The bound displays use
  // H_bar^T H_bar (= Q_i); its nonzero spectrum equals that of H_bar H_bar^T.
  Eigen::MatrixXd outer;
  // Relative tail tolerance of the truncated t-sum.
  double tolerance = 1e-8;
  // Hard cap on summed terms; the remaining tail is then estimated.
  std::int64_t max_terms = 8'000'000;

  bool stationary() const;
  double Beta(std::int64_t k) const;
  std::int64_t FirstActiveTime() const;

  // Throws DomainError naming the first violated inequality among the
  // gain condition beta_{i,k} lambda_max < 1 and summability.
  void CheckConditions() const;
};

// Builds the bound configuration of `sensor` from an algorithm config.
// With q_horizon > 0 the exact edge-probability series is attached.
FisherBoundConfig MakeFisherBoundConfig(const AlgorithmConfig& cfg, int sensor,
                                        std::int64_t q_horizon = 0);

// Scalar c with bound = c * outer, for the truncated double sum.
double FisherScalarGeneral(const FisherBoundConfig& cfg, std::int64_t k);
Eigen::MatrixXd FisherBoundGeneral(const FisherBoundConfig& cfg,
                                   std::int64_t k);

// R_{ij,k} for neighbour slot `slot` (index into cfg.neighbors).
double RateFactor(const FisherBoundConfig& cfg, std::int64_t k, int slot);
double FisherScalarRate(const FisherBoundConfig& cfg, std::int64_t k,
                        int slot);
Eigen::MatrixXd FisherBoundRate(const FisherBoundConfig& cfg, std::int64_t k,
                                int slot);
// Sum of the rate-form terms over all neighbours.
Eigen::MatrixXd FisherBoundRateTotal(const FisherBoundConfig& cfg,
                                     std::int64_t k);

// Ratio of quantized to unquantized Fisher information: Gaussian 2/pi,
// Cauchy 8/pi^2, Laplace 1.
double ImprovementFactor(NoiseFamily family);

enum class BoundForm { kGeneral, kRate };
std::string_view FormName(BoundForm form);
BoundForm ParseForm(std::string_view name);

struct FisherBoundTrajectory {
  std::vector<std::int64_t> times;
  std::vector<Eigen::MatrixXd> bounds;
  // Largest eigenvalue of each bound.
  std::vector<double> scalar_series;
  // Rate-form values with k < 10 are reported verbatim but flagged.
  std::vector<bool> pre_asymptotic;
};

FisherBoundTrajectory BuildTrajectory(const FisherBoundConfig& cfg,
                                      const std::vector<std::int64_t>& times,
                                      BoundForm form);

// Integer log-spaced grid on [lo, hi] with at most `points` distinct values.
std::vector<std::int64_t> LogGrid(std::int64_t lo, std::int64_t hi,
                                  int points);

struct DynamicEnhancementResult {
  bool holds = false;
  // witness[a] = smallest time T > times[a] after which every bound is
  // strictly below bound a; -1 where the bound is zero or a is the last
  // point.
  std::vector<std::int64_t> witness;
  std::optional<std::int64_t> first_violation;
};

DynamicEnhancementResult DynamicEnhancementCheck(
    const FisherBoundTrajectory& traj);

struct RateFitResult {
  double slope = 0.0;
  double intercept = 0.0;
  // Half-width of the 95% confidence interval of the slope.
  double halfwidth = 0.0;
  int points = 0;
};

// Least squares of log(value) on log(k) over k in [k_lo, k_hi].
RateFitResult RateFit(const std::vector<double>& ks,
                      const std::vector<double>& values, double k_lo,
                      double k_hi);

// Moore-Penrose inverse of a Fisher information matrix: the covariance floor
// of any unbiased estimator of the observation.
Eigen::MatrixXd CramerRaoFloor(const Eigen::MatrixXd& fisher);

}  // namespace privest

#endif  // PRIVEST_PRIVACY_ANALYSIS_H_
