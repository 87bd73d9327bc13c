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

#include "privest/privacy_analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "privest/errors.h"

namespace privest {
namespace {

std::string Num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Neighbours sharing a growth exponent and a stationary q collapse into one
// group: term_t = coef * t^{-2 eps}.
struct EtaGroup {
  double eps = 0.0;
  double coef = 0.0;
  const PrivacyNeighbor* series = nullptr;
};

std::vector<EtaGroup> GroupNeighbors(const FisherBoundConfig& cfg) {
  std::map<double, double> merged;
  std::vector<EtaGroup> groups;
  for (const auto& nb : cfg.neighbors) {
    const double eps = nb.noise.growth_exponent();
    const double eta1 = nb.noise.Eta(1);
    if (nb.q_series.empty()) {
      merged[eps] += nb.q_stationary * eta1;
    } else {
      groups.push_back({eps, eta1, &nb});
    }
  }
  for (const auto& [eps, coef] : merged) groups.push_back({eps, coef, nullptr});
  return groups;
}

}  // namespace

double PrivacyNeighbor::q(std::int64_t t) const {
  if (t >= 1 && static_cast<std::size_t>(t) <= q_series.size()) {
    return q_series[t - 1];
  }
  return q_stationary;
}

bool FisherBoundConfig::stationary() const {
  return std::all_of(neighbors.begin(), neighbors.end(),
                     [](const PrivacyNeighbor& n) { return n.q_series.empty(); });
}

double FisherBoundConfig::Beta(std::int64_t k) const {
  const double kk = static_cast<double>(k);
  if (kk < beta.warmup) return 0.0;
  return beta.beta_base / std::pow(kk, beta.delta);
}

std::int64_t FisherBoundConfig::FirstActiveTime() const {
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(beta.warmup)));
}

void FisherBoundConfig::CheckConditions() const {
  const std::string who = "sensor " + std::to_string(sensor + 1) + ": ";
  const std::int64_t k1 = FirstActiveTime();
  const double gain = Beta(k1) * lambda_max;
  if (!(gain < 1.0)) {
    throw DomainError(who + "β_{i,k}λ_max(Q_i) < 1 violated at k = " +
                      std::to_string(k1) + " (" + Num(gain) + ")");
  }
  if (lambda_min_plus <= 0.0 || neighbors.empty()) return;
  if (beta.delta > 1.0 || beta.delta <= 0.5) {
    throw DomainError(who + "δ_i ∈ (1/2, 1] violated (δ = " +
                      Num(beta.delta) + ")");
  }
  if (beta.delta == 1.0) {
    for (const auto& nb : neighbors) {
      const double v = 2.0 * lambda_min_plus * beta.beta_base +
                       2.0 * nb.noise.growth_exponent();
      if (!(v > 1.0)) {
        throw DomainError(who + "2λ⁺_min β_{i,1} + 2ε_ij > 1 violated for "
                          "neighbour " + std::to_string(nb.neighbor + 1) +
                          " (" + Num(v) + ")");
      }
    }
  }
}

FisherBoundConfig MakeFisherBoundConfig(const AlgorithmConfig& cfg, int sensor,
                                        std::int64_t q_horizon) {
  if (sensor < 0 || sensor >= cfg.sensor_count()) {
    throw DomainError("sensor " + std::to_string(sensor + 1) +
                      " out of range");
  }
  FisherBoundConfig out;
  out.sensor = sensor;
  out.beta = cfg.steps.sensors().at(sensor);
  const SensorSpec& spec = cfg.sensors[sensor];
  const SpectralInfo info = Spectral(spec);
  out.lambda_min_plus = info.lambda_min_plus.value_or(0.0);
  out.lambda_max = info.lambda_max;
  out.outer = info.gram;
  for (int j : cfg.graph.UnionNeighbors(sensor)) {
    PrivacyNeighbor nb;
    nb.neighbor = j;
    nb.q_stationary = cfg.graph.StationaryEdgeProbability(sensor, j);
    nb.noise = cfg.noise[cfg.graph.UnionEdgeIndex(sensor, j)];
    if (q_horizon > 0) {
      nb.q_series = cfg.graph.EdgeProbabilities(sensor, j, q_horizon);
    }
    out.neighbors.push_back(std::move(nb));
  }
  return out;
}

double FisherScalarGeneral(const FisherBoundConfig& cfg, std::int64_t k) {
  if (k < 1) throw DomainError("bound time must be >= 1");
  cfg.CheckConditions();
  const double beta_k = cfg.Beta(k);
  if (beta_k == 0.0 || cfg.neighbors.empty() || cfg.lambda_min_plus <= 0.0) {
    return 0.0;
  }
  const std::vector<EtaGroup> groups = GroupNeighbors(cfg);
  const double lam = cfg.lambda_min_plus;
  // log of prod_{l=k+1}^{t-1} (1 - lam beta_l)
  double log_prod = 0.0;
  double sum = 0.0;
  double prev_term = 0.0;
  std::int64_t count = 0;
  // Tail estimate and partial sum at the previous checkpoint.
  double check_tail = std::numeric_limits<double>::infinity();
  double check_sum = 0.0;
  double check_t = 0.0;
  for (std::int64_t t = k + 1;; ++t, ++count) {
    const double lt = std::log(static_cast<double>(t));
    double eta_q = 0.0;
    for (const auto& g : groups) {
      const double q = g.series ? g.series->q(t) : 1.0;
      eta_q += q * g.coef * std::exp(-2.0 * g.eps * lt);
    }
    const double term = eta_q * std::exp(2.0 * log_prod);
    sum += term;
    const double b = cfg.Beta(t);
    if (b > 0.0) {
      const double f = 1.0 - lam * b;
      if (f <= 0.0) break;
      log_prod += std::log1p(-lam * b);
    }
    if (term == 0.0 && sum > 0.0) break;
    const bool capped = count + 1 >= cfg.max_terms;
    if ((count >= 64 && count % 256 == 0) || capped) {
      // Local power-law tail: term_s ~ term_t (t/s)^p.
      const double tt = static_cast<double>(t);
      double tail = std::numeric_limits<double>::infinity();
      if (prev_term > 0.0 && term > 0.0) {
        const double p = -std::log(term / prev_term) / std::log(tt / (tt - 1.0));
        if (p > 1.0) {
          tail = term * std::pow(tt, p) * std::pow(tt + 0.5, 1.0 - p) /
                 (p - 1.0);
        }
      }
      if (tail <= cfg.tolerance * sum) {
        sum += tail;
        break;
      }
      // The estimate's bias shrinks like 1/t, so the drift between
      // checkpoints, scaled by t / dt, bounds its remaining error.
      if (std::isfinite(tail) && std::isfinite(check_tail)) {
        const double drift = std::abs(tail - (check_tail - (sum - check_sum)));
        if (drift * tt / (tt - check_t) <= cfg.tolerance * sum) {
          sum += tail;
          break;
        }
      }
      if (capped) {
        if (!std::isfinite(tail)) {
          throw NumericError("sensor " + std::to_string(cfg.sensor + 1) +
                             ": bound series does not decay fast enough to "
                             "sum at k = " + std::to_string(k));
        }
        sum += tail;
        break;
      }
      check_tail = tail;
      check_sum = sum;
      check_t = tt;
    }
    prev_term = term;
  }
  return beta_k * beta_k * sum;
}

Eigen::MatrixXd FisherBoundGeneral(const FisherBoundConfig& cfg,
                                   std::int64_t k) {
  return FisherScalarGeneral(cfg, k) * cfg.outer;
}

double RateFactor(const FisherBoundConfig& cfg, std::int64_t k, int slot) {
  const PrivacyNeighbor& nb = cfg.neighbors.at(slot);
  const double lam = cfg.lambda_min_plus;
  const double b1 = cfg.beta.beta_base;
  const double d = cfg.beta.delta;
  const double eps = nb.noise.growth_exponent();
  const double kk = static_cast<double>(k);
  if (d == 1.0) {
    if (k <= 1) {
      throw DomainError("rate form with δ = 1 needs k ≥ 2");
    }
    const double den = 2.0 * lam * b1 + 2.0 * eps - 1.0;
    if (!(den > 0.0)) {
      throw DomainError("2λ⁺_min β_{i,1} + 2ε_ij > 1 violated (" +
                        Num(den + 1.0) + ")");
    }
    const double a = 2.0 * lam * b1;
    return b1 / den *
           std::exp(a * std::log(kk + 1.0) + 2.0 * eps * std::log(kk) -
                    (a + 2.0 * eps) * std::log(kk - 1.0));
  }
  const double den = 2.0 * lam * b1 - (d - 2.0 * eps) * std::pow(kk, d - 1.0);
  if (!(den > 0.0)) {
    throw DomainError("2λ⁺_min β_{i,1} − (δ_i − 2ε_ij)k^{δ_i−1} > 0 violated "
                      "at k = " + std::to_string(k) + " (" + Num(den) + ")");
  }
  return b1 / den;
}

double FisherScalarRate(const FisherBoundConfig& cfg, std::int64_t k,
                        int slot) {
  if (k < 1) throw DomainError("bound time must be >= 1");
  if (!cfg.stationary()) {
    throw DomainError("rate form requires a stationary initial topology law "
                      "(p_{u,1} = π_u)");
  }
  cfg.CheckConditions();
  const PrivacyNeighbor& nb = cfg.neighbors.at(slot);
  const double beta_k = cfg.Beta(k);
  if (beta_k == 0.0 || cfg.lambda_min_plus <= 0.0) return 0.0;
  const double cap = std::pow(cfg.beta.warmup, cfg.beta.delta);
  if (!(cfg.beta.beta_base < cap)) {
    throw DomainError("β_{i,1} ∈ (0, k_{i,0}^δ) violated (" +
                      Num(cfg.beta.beta_base) + " ≥ " + Num(cap) + ")");
  }
  return nb.q_stationary * RateFactor(cfg, k, slot) * beta_k *
         nb.noise.Eta(k);
}

Eigen::MatrixXd FisherBoundRate(const FisherBoundConfig& cfg, std::int64_t k,
                                int slot) {
  return FisherScalarRate(cfg, k, slot) * cfg.outer;
}

Eigen::MatrixXd FisherBoundRateTotal(const FisherBoundConfig& cfg,
                                     std::int64_t k) {
  double c = 0.0;
  for (int s = 0; s < static_cast<int>(cfg.neighbors.size()); ++s) {
    c += FisherScalarRate(cfg, k, s);
  }
  if (cfg.neighbors.empty()) cfg.CheckConditions();
  return c * cfg.outer;
}

double ImprovementFactor(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian:
      return 2.0 / M_PI;
    case NoiseFamily::kCauchy:
      return 8.0 / (M_PI * M_PI);
    case NoiseFamily::kLaplace:
      return 1.0;
  }
  throw DomainError("unknown noise family");
}

std::string_view FormName(BoundForm form) {
  return form == BoundForm::kGeneral ? "general" : "rate";
}

BoundForm ParseForm(std::string_view name) {
  if (name == "general") return BoundForm::kGeneral;
  if (name == "rate") return BoundForm::kRate;
  throw ValidationError("unknown bound form '" + std::string(name) +
                        "' (expected general or rate)");
}

FisherBoundTrajectory BuildTrajectory(const FisherBoundConfig& cfg,
                                      const std::vector<std::int64_t>& times,
                                      BoundForm form) {
  FisherBoundTrajectory traj;
  const double outer_max =
      cfg.outer.size() == 0
          ? 0.0
          : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                cfg.outer, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .maxCoeff();
  for (std::int64_t k : times) {
    double c = 0.0;
    if (form == BoundForm::kGeneral) {
      c = FisherScalarGeneral(cfg, k);
    } else {
      for (int s = 0; s < static_cast<int>(cfg.neighbors.size()); ++s) {
        c += FisherScalarRate(cfg, k, s);
      }
    }
    traj.times.push_back(k);
    traj.bounds.push_back(c * cfg.outer);
    traj.scalar_series.push_back(c * std::max(outer_max, 0.0));
    traj.pre_asymptotic.push_back(form == BoundForm::kRate && k < 10);
  }
  return traj;
}

std::vector<std::int64_t> LogGrid(std::int64_t lo, std::int64_t hi,
                                  int points) {
  if (lo < 1 || hi < lo || points < 1) {
    throw DomainError("log grid needs 1 <= lo <= hi and points >= 1");
  }
  std::vector<std::int64_t> out;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (int p = 0; p < points; ++p) {
    const double x = points == 1 ? a : a + (b - a) * p / (points - 1);
    const auto k = static_cast<std::int64_t>(std::llround(std::exp(x)));
    if (out.empty() || k > out.back()) out.push_back(std::clamp(k, lo, hi));
  }
  return out;
}

DynamicEnhancementResult DynamicEnhancementCheck(
    const FisherBoundTrajectory& traj) {
  const auto& v = traj.scalar_series;
  const std::size_t n = v.size();
  if (n < 10) throw DomainError("dynamic enhancement check needs >= 10 points");
  // suffix[b] = max over c >= b of v[c]; nonincreasing in b.
  std::vector<double> suffix(n);
  suffix[n - 1] = v[n - 1];
  for (std::size_t b = n - 1; b-- > 0;) suffix[b] = std::max(v[b], suffix[b + 1]);
  DynamicEnhancementResult out;
  out.holds = true;
  out.witness.assign(n, -1);
  for (std::size_t a = 0; a + 1 < n; ++a) {
    if (!(v[a] > 0.0)) continue;
    // Smallest b > a with suffix[b] < v[a].
    std::size_t lo = a + 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (suffix[mid] < v[a]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    if (lo == n) {
      out.holds = false;
      if (!out.first_violation) out.first_violation = traj.times[a];
    } else {
      out.witness[a] = traj.times[lo];
    }
  }
  return out;
}

RateFitResult RateFit(const std::vector<double>& ks,
                      const std::vector<double>& values, double k_lo,
                      double k_hi) {
  if (ks.size() != values.size()) {
    throw DomainError("rate fit needs equally long k and value series");
  }
  if (!(k_lo > 0.0) || !(k_hi / k_lo >= 10.0)) {
    throw DomainError("rate fit window needs k_hi / k_lo >= 10");
  }
  std::vector<double> x, y;
  for (std::size_t p = 0; p < ks.size(); ++p) {
    if (ks[p] < k_lo || ks[p] > k_hi) continue;
    if (!(values[p] > 0.0)) {
      throw DomainError("rate fit needs positive values; got " +
                        Num(values[p]) + " at k = " + Num(ks[p]));
    }
    x.push_back(std::log(ks[p]));
    y.push_back(std::log(values[p]));
  }
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("rate fit needs at least 3 points in window");
  double mx = 0.0, my = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    mx += x[p];
    my += y[p];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    sxx += (x[p] - mx) * (x[p] - mx);
    sxy += (x[p] - mx) * (y[p] - my);
  }
  RateFitResult out;
  out.points = static_cast<int>(n);
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double sse = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double r = y[p] - out.intercept - out.slope * x[p];
    sse += r * r;
  }
  const double se = std::sqrt(sse / (n - 2) / sxx);
  boost::math::students_t dist(static_cast<double>(n - 2));
  out.halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return out;
}

Eigen::MatrixXd CramerRaoFloor(const Eigen::MatrixXd& fisher) {
  return fisher.completeOrthogonalDecomposition().pseudoInverse();
}

}  // namespace privest
