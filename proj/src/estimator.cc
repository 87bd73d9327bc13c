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

#include "privest/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "privest/errors.h"

namespace privest {
namespace {

std::string Num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string EdgeName(const UndirectedEdge& e) {
  return "(" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) + ")";
}

}  // namespace

int CompressionIndex(int n, std::int64_t k) {
  if (n < 1 || k < 1) throw DomainError("compression vector needs n >= 1, k >= 1");
  return static_cast<int>((k - 1) % n);
}

Eigen::VectorXd CompressionVector(int n, std::int64_t k) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  phi(CompressionIndex(n, k)) = 1.0;
  return phi;
}

double DefaultWarmup(double beta_base, double delta) {
  return std::exp(std::floor(std::log(beta_base) / delta) + 1.0);
}

StepSizeSchedule::StepSizeSchedule(std::vector<EdgeStepSize> edges,
                                   std::vector<SensorStepSize> sensors)
    : edges_(std::move(edges)), sensors_(std::move(sensors)) {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (!(edges_[e].alpha_base > 0.0) || !(edges_[e].gamma > 0.0)) {
      throw ValidationError("edge step size " + std::to_string(e) +
                            " needs alpha_base > 0 and gamma > 0");
    }
  }
  for (std::size_t i = 0; i < sensors_.size(); ++i) {
    const auto& s = sensors_[i];
    if (!(s.beta_base > 0.0) || !(s.delta > 0.0) || !(s.warmup >= 0.0) ||
        !std::isfinite(s.warmup)) {
      throw ValidationError("sensor step size " + std::to_string(i + 1) +
                            " needs beta_base > 0, delta > 0, finite warmup");
    }
  }
}

double StepSizeSchedule::Alpha(int edge, std::int64_t k) const {
  const auto& e = edges_.at(edge);
  return e.alpha_base / std::pow(static_cast<double>(k), e.gamma);
}

double StepSizeSchedule::Beta(int sensor, std::int64_t k) const {
  const auto& s = sensors_.at(sensor);
  const double kk = static_cast<double>(k);
  if (kk < s.warmup) return 0.0;
  return s.beta_base / std::pow(kk, s.delta);
}

std::int64_t StepSizeSchedule::FirstActiveTime(int sensor) const {
  const double w = sensors_.at(sensor).warmup;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(w)));
}

void AlgorithmConfig::Validate() const {
  if (dimension < 1) throw ValidationError("dimension must be >= 1");
  const int n_sensors = sensor_count();
  if (n_sensors != graph.vertex_count()) {
    throw ValidationError("graph has " + std::to_string(graph.vertex_count()) +
                          " vertices but " + std::to_string(n_sensors) +
                          " sensors are configured");
  }
  for (int i = 0; i < n_sensors; ++i) {
    if (sensors[i].dimension() != dimension) {
      throw ValidationError("sensor " + std::to_string(i + 1) +
                            " has dimension " +
                            std::to_string(sensors[i].dimension()) +
                            ", expected " + std::to_string(dimension));
    }
  }
  const std::size_t m = graph.union_edges().size();
  if (thresholds.size() != m || noise.size() != m ||
      steps.edges().size() != m) {
    throw ValidationError("per-edge thresholds, noise and step sizes must "
                          "cover all " + std::to_string(m) + " union edges");
  }
  if (steps.sensors().size() != static_cast<std::size_t>(n_sensors)) {
    throw ValidationError("per-sensor step sizes must cover all " +
                          std::to_string(n_sensors) + " sensors");
  }
  for (double c : thresholds) {
    if (!std::isfinite(c)) throw ValidationError("thresholds must be finite");
  }
  if (!initial_estimates.empty()) {
    if (initial_estimates.size() != static_cast<std::size_t>(n_sensors)) {
      throw ValidationError("initial estimates must cover every sensor");
    }
    for (const auto& v : initial_estimates) {
      if (v.size() != dimension || !v.allFinite()) {
        throw ValidationError("initial estimates must be finite n-vectors");
      }
    }
  }
}

EstimatorState InitialState(const AlgorithmConfig& cfg) {
  EstimatorState state;
  state.k = 0;
  if (cfg.initial_estimates.empty()) {
    state.estimates.assign(cfg.sensor_count(),
                           Eigen::VectorXd::Zero(cfg.dimension));
  } else {
    state.estimates = cfg.initial_estimates;
  }
  return state;
}

Estimator::Estimator(const AlgorithmConfig& cfg, Eigen::VectorXd theta,
                     std::uint64_t root_seed, std::uint64_t run_index)
    : cfg_(cfg),
      theta_(std::move(theta)),
      graph_(cfg.graph),
      streams_(root_seed, run_index),
      state_(InitialState(cfg)) {
  cfg_.Validate();
  if (theta_.size() != cfg_.dimension) {
    throw ValidationError("theta has dimension " +
                          std::to_string(theta_.size()) + ", expected " +
                          std::to_string(cfg_.dimension));
  }
  const int n_sensors = cfg_.sensor_count();
  report_.fusion.assign(n_sensors, Eigen::VectorXd::Zero(cfg_.dimension));
  report_.bits_sent.assign(n_sensors, 0);
  observations_.resize(n_sensors);
  innovation_.resize(n_sensors);
  for (int i = 0; i < n_sensors; ++i) {
    observations_[i].resize(cfg_.sensors[i].rows());
    innovation_[i].resize(cfg_.sensors[i].rows());
  }
}

const StepReport& Estimator::Step() {
  const std::int64_t k = state_.k + 1;
  if (k == 1) {
    graph_.Start(streams_.graph);
  } else {
    graph_.Advance(streams_.graph);
  }
  const int n = cfg_.dimension;
  const int n_sensors = cfg_.sensor_count();
  for (int i = 0; i < n_sensors; ++i) {
    report_.fusion[i].setZero();
    report_.bits_sent[i] = 0;
  }
  const auto& live = graph_.LiveEdges();
  report_.live_edges = static_cast<int>(live.size());

  const int l = CompressionIndex(n, k);
  const int first = cfg_.use_compression ? l : 0;
  const int last = cfg_.use_compression ? l + 1 : n;
  for (const WeightedEdge& e : live) {
    const int idx = e.union_index;
    const double alpha = cfg_.steps.Alpha(idx, k);
    const double c = cfg_.thresholds[idx];
    const NoiseSchedule& noise = cfg_.noise[idx];
    const Eigen::VectorXd& xi = state_.estimates[e.i];
    const Eigen::VectorXd& xj = state_.estimates[e.j];
    for (int coord = first; coord < last; ++coord) {
      const double d_ij = noise.Sample(k, streams_.privacy_noise);
      const double d_ji = noise.Sample(k, streams_.privacy_noise);
      const int s_ij = Quantize(xi(coord), d_ij, c);
      const int s_ji = Quantize(xj(coord), d_ji, c);
      const double inc = alpha * e.weight * (s_ij - s_ji);
      report_.fusion[e.i](coord) += inc;
      report_.fusion[e.j](coord) -= inc;
    }
    report_.bits_sent[e.i] += last - first;
    report_.bits_sent[e.j] += last - first;
  }

  for (int i = 0; i < n_sensors; ++i) {
    const SensorSpec& spec = cfg_.sensors[i];
    ObserveInto(spec, theta_, streams_.failure, streams_.observation_noise,
                observations_[i]);
  }
  for (int i = 0; i < n_sensors; ++i) {
    const SensorSpec& spec = cfg_.sensors[i];
    Eigen::VectorXd& est = state_.estimates[i];
    const double beta = cfg_.steps.Beta(i, k);
    if (beta != 0.0) {
      innovation_[i] = observations_[i];
      innovation_[i].noalias() -= spec.mean_matrix * est;
      est.noalias() += beta * (spec.mean_matrix.transpose() * innovation_[i]);
    }
    est += report_.fusion[i];
    if (!est.allFinite()) {
      throw NumericError("non-finite estimate at sensor " +
                         std::to_string(i + 1) + ", time " +
                         std::to_string(k));
    }
  }
  state_.k = k;
  return report_;
}

RunResult Run(const AlgorithmConfig& cfg, const Eigen::VectorXd& theta,
              std::int64_t horizon, std::uint64_t root_seed,
              std::uint64_t run_index) {
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  Estimator est(cfg, theta, root_seed, run_index);
  const int n_sensors = cfg.sensor_count();
  RunResult result;
  result.sq_error.resize(horizon, n_sensors);
  result.bits.resize(horizon, n_sensors);
  for (std::int64_t t = 0; t < horizon; ++t) {
    const StepReport& rep = est.Step();
    for (int i = 0; i < n_sensors; ++i) {
      result.sq_error(t, i) = (est.state().estimates[i] - theta).squaredNorm();
      result.bits(t, i) = static_cast<std::int32_t>(rep.bits_sent[i]);
      result.total_bits += rep.bits_sent[i];
    }
    result.live_edge_steps += rep.live_edges;
  }
  result.final_state = est.state();
  return result;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::Find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

AssumptionReport ValidateAssumptions(const AlgorithmConfig& cfg) {
  AssumptionReport report;
  auto add = [&](std::string name, bool ok, std::string detail) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  const auto& edges = cfg.graph.union_edges();
  const auto& es = cfg.steps.edges();
  const auto& ss = cfg.steps.sensors();

  add("union graph connected", cfg.graph.IsUnionConnected(),
      cfg.graph.IsUnionConnected() ? "" : "union graph has more than one "
                                          "component");

  bool observable = false;
  std::string obs_detail;
  try {
    observable = CooperativeObservability(cfg.sensors);
    if (!observable) obs_detail = "sum of H_i^T H_i is singular";
  } catch (const Error& e) {
    obs_detail = e.what();
  }
  add("cooperative observability", observable, obs_detail);

  {
    bool ok = true;
    std::string detail;
    for (std::size_t e = 0; e < edges.size() && e < es.size(); ++e) {
      if (!(2.0 * es[e].gamma > 1.0)) {
        ok = false;
        detail = "2γ > 1 fails on edge " + EdgeName(edges[e]) + ": γ = " +
                 Num(es[e].gamma);
        break;
      }
    }
    add("Σα² < ∞", ok, detail);
  }
  {
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < ss.size(); ++i) {
      if (!(2.0 * ss[i].delta > 1.0)) {
        ok = false;
        detail = "2δ > 1 fails at sensor " + std::to_string(i + 1) +
                 ": δ = " + Num(ss[i].delta);
        break;
      }
    }
    add("Σβ² < ∞", ok, detail);
  }
  {
    bool ok = true;
    std::string detail;
    for (std::size_t e = 0; e < edges.size() && e < es.size(); ++e) {
      const double eps = cfg.noise[e].growth_exponent();
      if (es[e].gamma + eps > 1.0) {
        ok = false;
        detail = "γ + ε ≤ 1 fails on edge " + EdgeName(edges[e]) + ": " +
                 Num(es[e].gamma) + " + " + Num(eps) + " > 1";
        break;
      }
    }
    for (std::size_t i = 0; ok && i < ss.size(); ++i) {
      if (ss[i].delta > 1.0) {
        ok = false;
        detail = "δ ≤ 1 fails at sensor " + std::to_string(i + 1) +
                 ": δ = " + Num(ss[i].delta);
      }
    }
    add("Σz_k = ∞", ok, detail);
  }
  {
    bool ok = true;
    std::string detail;
    for (std::size_t e = 0; e < cfg.noise.size(); ++e) {
      const double eps = cfg.noise[e].growth_exponent();
      if (!ScheduleFeasible(eps)) {
        ok = false;
        detail = "ε ≤ 1/2 fails on edge " +
                 (e < edges.size() ? EdgeName(edges[e]) : std::to_string(e)) +
                 ": ε = " + Num(eps);
        break;
      }
    }
    add("noise growth ε ≤ 1/2", ok, detail);
  }
  {
    double max_ge = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < edges.size() && e < es.size(); ++e) {
      max_ge = std::max(max_ge, es[e].gamma + cfg.noise[e].growth_exponent());
    }
    double min_d = std::numeric_limits<double>::infinity();
    double max_d = -std::numeric_limits<double>::infinity();
    for (const auto& s : ss) {
      min_d = std::min(min_d, s.delta);
      max_d = std::max(max_d, s.delta);
    }
    const bool ok = max_ge < min_d && max_d <= 1.0;
    add("rate ordering max(γ+ε) < min δ ≤ max δ ≤ 1", ok,
        ok ? "" : "max(γ+ε) = " + Num(max_ge) + ", min δ = " + Num(min_d) +
                      ", max δ = " + Num(max_d));
  }

  // Privacy-bound conditions, per sensor.
  bool gain_ok = true, warm_ok = true, sum_ok = true;
  std::string gain_detail, warm_detail, sum_detail;
  for (int i = 0; i < cfg.sensor_count() && i < static_cast<int>(ss.size());
       ++i) {
    const SpectralInfo info = Spectral(cfg.sensors[i]);
    const auto& s = ss[i];
    const std::int64_t k1 = cfg.steps.FirstActiveTime(i);
    const double gain = cfg.steps.Beta(i, k1) * info.lambda_max;
    if (gain_ok && !(gain < 1.0)) {
      gain_ok = false;
      gain_detail = "sensor " + std::to_string(i + 1) + ": β_{i," +
                    std::to_string(k1) + "}λ_max = " + Num(gain) + " ≥ 1";
    }
    const double cap = std::pow(s.warmup, s.delta);
    if (warm_ok && !(s.beta_base < cap)) {
      warm_ok = false;
      warm_detail = "sensor " + std::to_string(i + 1) + ": β_{i,1} = " +
                    Num(s.beta_base) + " ≥ k_{i,0}^δ = " + Num(cap);
    }
    if (!info.lambda_min_plus || s.delta != 1.0) continue;
    const double lam = *info.lambda_min_plus;
    for (int j : cfg.graph.UnionNeighbors(i)) {
      const int e = cfg.graph.UnionEdgeIndex(i, j);
      const double eps = cfg.noise[e].growth_exponent();
      const double v = 2.0 * lam * s.beta_base + 2.0 * eps;
      if (sum_ok && !(v > 1.0)) {
        sum_ok = false;
        sum_detail = "sensor " +
                     std::to_string(i + 1) + ", edge " + EdgeName(edges[e]) +
                     ": 2λ⁺β_{i,1} + 2ε = " + Num(v);
      }
    }
  }
  add("β_{i,k}λ_max(Q_i) < 1 for k ≥ k_{i,0}", gain_ok, gain_detail);
  add("β_{i,1} < k_{i,0}^δ", warm_ok, warm_detail);
  add("Fisher summability 2λ⁺β_{i,1} + 2ε > 1", sum_ok, sum_detail);
  return report;
}

}  // namespace privest
