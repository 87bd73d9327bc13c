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

// The binary-valued quantizer-based distributed estimator. At each time k
// every sensor compresses its previous estimate to one coordinate, perturbs
// it with privacy noise, sends the sign of (threshold - value) to each live
// neighbour, fuses the received bits, and corrects with its own observation.

#ifndef PRIVEST_ESTIMATOR_H_
#define PRIVEST_ESTIMATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "privest/graph_model.h"
#include "privest/noise_models.h"
#include "privest/observation_model.h"
#include "privest/random.h"

namespace privest {

// Unit basis vector e_l with l = (k - 1) mod n (0-based), i.e. the l-th
// coordinate in 1-based terms satisfies k = n q + l with l in {1..n}.
Eigen::VectorXd CompressionVector(int n, std::int64_t k);
int CompressionIndex(int n, std::int64_t k);

// +1 if x + d <= threshold, -1 otherwise.
inline int Quantize(double x, double d, double threshold) {
  return x + d <= threshold ? 1 : -1;
}

struct EdgeStepSize {
  double alpha_base = 1.0;
  double gamma = 1.0;
};

struct SensorStepSize {
  double beta_base = 1.0;
  double delta = 1.0;
  // beta_{i,k} = 0 for k < warmup.
  double warmup = 1.0;
};

// exp(floor(ln(beta_base) / delta) + 1); guarantees beta_base < warmup^delta.
double DefaultWarmup(double beta_base, double delta);

// alpha_{ij,k} = alpha_base / k^gamma per union edge and
// beta_{i,k} = beta_base / k^delta for k >= warmup (0 before) per sensor.
class StepSizeSchedule {
 public:
  StepSizeSchedule() = default;
  StepSizeSchedule(std::vector<EdgeStepSize> edges,
                   std::vector<SensorStepSize> sensors);

  double Alpha(int edge, std::int64_t k) const;
  double Beta(int sensor, std::int64_t k) const;
  // First integer time with a nonzero beta.
  std::int64_t FirstActiveTime(int sensor) const;

  const std::vector<EdgeStepSize>& edges() const { return edges_; }
  const std::vector<SensorStepSize>& sensors() const { return sensors_; }
  std::vector<EdgeStepSize>& mutable_edges() { return edges_; }
  std::vector<SensorStepSize>& mutable_sensors() { return sensors_; }

 private:
  std::vector<EdgeStepSize> edges_;
  std::vector<SensorStepSize> sensors_;
};

// Everything the estimator consumes. Per-edge quantities are indexed by the
// graph's union edge list and therefore symmetric in (i, j) by construction.
struct AlgorithmConfig {
  int dimension = 1;
  // Compress to one coordinate per step (1 bit per neighbour). When false,
  // every coordinate is quantized with its own noise draw (n bits).
  bool use_compression = true;
  CommunicationGraph graph;
  std::vector<SensorSpec> sensors;
  std::vector<double> thresholds;
  std::vector<NoiseSchedule> noise;
  StepSizeSchedule steps;
  // Empty means all-zero initial estimates.
  std::vector<Eigen::VectorXd> initial_estimates;

  int sensor_count() const { return static_cast<int>(sensors.size()); }
  int edge_count() const {
    return static_cast<int>(graph.union_edges().size());
  }
  // Structural checks (sizes, dimensions, positivity). Throws ValidationError.
  void Validate() const;
};

struct EstimatorState {
  std::int64_t k = 0;
  std::vector<Eigen::VectorXd> estimates;
};

EstimatorState InitialState(const AlgorithmConfig& cfg);

struct StepReport {
  // Consensus increment phi_k sum_j alpha a (s_ij - s_ji) per sensor.
  std::vector<Eigen::VectorXd> fusion;
  // Binary symbols sent by each sensor during the step.
  std::vector<std::int64_t> bits_sent;
  int live_edges = 0;
};

// One iteration of the algorithm. Draw order, which the trace tests rely on:
// the graph stream advances once; then for each live edge in union-index
// order and each quantized coordinate, d_ij then d_ji from the privacy noise
// stream; then for each sensor in order, its failure draw and its
// observation-noise draws.
class Estimator {
 public:
  Estimator(const AlgorithmConfig& cfg, Eigen::VectorXd theta,
            std::uint64_t root_seed, std::uint64_t run_index = 0);

  const EstimatorState& state() const { return state_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const CommunicationGraph& graph() const { return graph_; }

  // Throws NumericError with sensor and time when an estimate becomes
  // non-finite.
  const StepReport& Step();

 private:
  const AlgorithmConfig& cfg_;
  Eigen::VectorXd theta_;
  CommunicationGraph graph_;
  RunStreams streams_;
  EstimatorState state_;
  StepReport report_;
  std::vector<Eigen::VectorXd> observations_;
  std::vector<Eigen::VectorXd> innovation_;
};

struct RunResult {
  // sq_error(k - 1, i) = ||theta_hat_{i,k} - theta||^2.
  Eigen::MatrixXd sq_error;
  // bits(k - 1, i) = symbols sent by sensor i at time k.
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> bits;
  std::int64_t total_bits = 0;
  // Sum over k of the number of live undirected edges.
  std::int64_t live_edge_steps = 0;
  EstimatorState final_state;
};

// Runs `horizon` steps. Deterministic given (root_seed, run_index).
RunResult Run(const AlgorithmConfig& cfg, const Eigen::VectorXd& theta,
              std::int64_t horizon, std::uint64_t root_seed,
              std::uint64_t run_index = 0);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck* Find(const std::string& name) const;
};

// Connectivity, observability, step-size summability, divergence of the
// combined step sequence, rate ordering and the privacy-bound conditions.
// Never throws for unmet conditions; each is reported with the violated
// inequality.
AssumptionReport ValidateAssumptions(const AlgorithmConfig& cfg);

}  // namespace privest

#endif  // PRIVEST_ESTIMATOR_H_
