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

// Monte Carlo harness and the experiment drivers built on it.

#ifndef PRIVEST_EXPERIMENTS_H_
#define PRIVEST_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "privest/estimator.h"
#include "privest/privacy_analysis.h"

namespace privest {

struct MonteCarloOptions {
  int repeats = 20;
  std::int64_t horizon = 100000;
  std::uint64_t seed = 0;
  // Worker threads; 0 picks the hardware concurrency.
  int jobs = 0;
};

struct MonteCarloResult {
  // Average over runs and sensors of ||theta_hat_{i,k} - theta||^2, k = 1..T.
  std::vector<double> mean_sq_error;
  // Standard error of that average across runs.
  std::vector<double> std_error;
  // run_series(r, k - 1) = sensor-averaged squared error of run r.
  Eigen::MatrixXd run_series;
  // Sensor-averaged final estimate of each run (one row per run).
  Eigen::MatrixXd final_mean_estimates;
  std::int64_t total_bits = 0;
  std::int64_t live_edge_steps = 0;
};

// Runs `repeats` independent seeded runs in parallel and reduces them in run
// order, so the result does not depend on `jobs`.
MonteCarloResult MonteCarlo(const AlgorithmConfig& cfg,
                            const Eigen::VectorXd& theta,
                            const MonteCarloOptions& options);

// The same configuration with every link removed.
AlgorithmConfig WithoutCommunication(const AlgorithmConfig& cfg);

// Mean over runs of the late-window average of the run series on
// k in [from, to], with its standard error across runs.
struct WindowMean {
  double mean = 0.0;
  double std_error = 0.0;
};
WindowMean LateWindowMean(const MonteCarloResult& result, std::int64_t from,
                          std::int64_t to);

// Log-log slope of the averaged series over [k_lo, k_hi], sampled on a log
// grid of `points` times.
RateFitResult SeriesSlope(const std::vector<double>& series, std::int64_t k_lo,
                          std::int64_t k_hi, int points = 200);

struct TradeoffPoint {
  double nu = 0.0;
  double chi = 0.0;
  double delta = 1.0;
  double eps = 0.0;
  double gamma = 0.0;
  double beta1 = 0.0;
  double k0 = 1.0;
};

// Parameters from the constructive trade-off argument. Throws DomainError
// unless nu in (1/2, 1) and chi in [1, 2 nu).
TradeoffPoint TradeoffParams(double nu, double chi, double lambda_min_plus);

// Applies a trade-off point to every edge and sensor of `base`: Cauchy noise
// with scale k^eps, alpha = alpha_base / k^gamma, beta = beta1 / k for
// k >= k0. The base config keeps its graph, sensors and thresholds.
AlgorithmConfig ApplyTradeoff(const AlgorithmConfig& base,
                              const TradeoffPoint& point, double alpha_base,
                              double noise_base_scale);

struct TradeoffEntry {
  TradeoffPoint point;
  double bound_slope = 0.0;
  double mse_slope = 0.0;
  WindowMean late_mse;
};

struct TradeoffOptions {
  MonteCarloOptions monte_carlo;
  double alpha_base = 3.0;
  double noise_base_scale = 1.0;
  int bound_sensor = 0;
  std::int64_t fit_lo = 1000;
  std::int64_t fit_hi = 100000;
};

struct TradeoffReport {
  std::vector<TradeoffEntry> entries;  // sorted by chi
  bool bound_ordered = false;
  bool mse_ordered = false;
  // "monotone", "not monotone", "tie" or "insufficient points".
  std::string verdict;
};

TradeoffReport TradeoffSweep(const AlgorithmConfig& base,
                             const Eigen::VectorXd& theta, double nu,
                             std::vector<double> chis,
                             const TradeoffOptions& options);

struct HighdimResult {
  MonteCarloResult one_bit;
  MonteCarloResult multi_bit;
  // Mean squared error divided by the dimension.
  std::vector<double> one_bit_normalized;
  std::vector<double> multi_bit_normalized;
};

// Paired runs with and without compression under identical seeds.
HighdimResult HighdimCompare(const AlgorithmConfig& cfg,
                             const Eigen::VectorXd& theta,
                             const MonteCarloOptions& options);

struct EventRateResult {
  MonteCarloResult monte_carlo;
  // Mean over runs and sensors of the final estimate.
  double mean_estimate = 0.0;
  double abs_error = 0.0;
};

// Scalar event-rate estimation from Bernoulli observations.
EventRateResult EventRateSynthetic(const AlgorithmConfig& cfg,
                                   double theta_true,
                                   const MonteCarloOptions& options);

// Uniform draw in [-1, 1]^n from a seeded stream.
Eigen::VectorXd UniformTheta(int n, std::uint64_t seed);

void WriteMetricsCsv(const std::string& path, const MonteCarloResult& result);
void WritePrivacyCsv(const std::string& path, int sensor,
                     const FisherBoundTrajectory& traj);
void WriteTradeoffCsv(const std::string& path, const TradeoffReport& report);
// Per-step per-sensor output of a single run: k, sensor, sq_error, bits_sent.
void WriteRunCsv(const std::string& path, const RunResult& run);

}  // namespace privest

#endif  // PRIVEST_EXPERIMENTS_H_
