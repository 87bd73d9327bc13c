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

#include "privest/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "privest/errors.h"
#include "privest/random.h"

namespace privest {
namespace {

struct RunSummary {
  std::vector<double> series;
  Eigen::VectorXd final_mean;
  std::int64_t bits = 0;
  std::int64_t live_edge_steps = 0;
};

RunSummary SimulateOne(const AlgorithmConfig& cfg,
                       const Eigen::VectorXd& theta, std::int64_t horizon,
                       std::uint64_t seed, std::uint64_t run) {
  Estimator est(cfg, theta, seed, run);
  const int n_sensors = cfg.sensor_count();
  RunSummary out;
  out.series.resize(horizon);
  for (std::int64_t t = 0; t < horizon; ++t) {
    const StepReport& rep = est.Step();
    double acc = 0.0;
    for (int i = 0; i < n_sensors; ++i) {
      acc += (est.state().estimates[i] - theta).squaredNorm();
      out.bits += rep.bits_sent[i];
    }
    out.series[t] = acc / n_sensors;
    out.live_edge_steps += rep.live_edges;
  }
  out.final_mean = Eigen::VectorXd::Zero(cfg.dimension);
  for (const auto& e : est.state().estimates) out.final_mean += e;
  out.final_mean /= n_sensors;
  return out;
}

[[noreturn]] void RethrowWithRun(std::exception_ptr ep, int run) {
  const std::string prefix = "run " + std::to_string(run) + ": ";
  try {
    std::rethrow_exception(ep);
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const NumericError& e) {
    throw NumericError(prefix + e.what());
  } catch (const std::exception& e) {
    throw Error(prefix + e.what());
  }
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

MonteCarloResult MonteCarlo(const AlgorithmConfig& cfg,
                            const Eigen::VectorXd& theta,
                            const MonteCarloOptions& options) {
  if (options.repeats < 1) throw ValidationError("repeats must be >= 1");
  if (options.horizon < 1) throw ValidationError("horizon must be >= 1");
  cfg.Validate();
  const int repeats = options.repeats;
  int jobs = options.jobs > 0
                 ? options.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, repeats);

  std::vector<RunSummary> runs(repeats);
  std::vector<std::exception_ptr> errors(repeats);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < repeats; r = next++) {
      try {
        runs[r] = SimulateOne(cfg, theta, options.horizon, options.seed, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (int r = 0; r < repeats; ++r) {
    if (errors[r]) RethrowWithRun(errors[r], r);
  }

  const std::int64_t horizon = options.horizon;
  MonteCarloResult out;
  out.run_series.resize(repeats, horizon);
  out.final_mean_estimates.resize(repeats, cfg.dimension);
  for (int r = 0; r < repeats; ++r) {
    out.run_series.row(r) =
        Eigen::Map<const Eigen::RowVectorXd>(runs[r].series.data(), horizon);
    out.final_mean_estimates.row(r) = runs[r].final_mean.transpose();
    out.total_bits += runs[r].bits;
    out.live_edge_steps += runs[r].live_edge_steps;
  }
  out.mean_sq_error.resize(horizon);
  out.std_error.resize(horizon);
  for (std::int64_t t = 0; t < horizon; ++t) {
    double mean = 0.0;
    for (int r = 0; r < repeats; ++r) mean += out.run_series(r, t);
    mean /= repeats;
    double ss = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const double d = out.run_series(r, t) - mean;
      ss += d * d;
    }
    out.mean_sq_error[t] = mean;
    out.std_error[t] =
        repeats > 1 ? std::sqrt(ss / (repeats - 1) / repeats) : 0.0;
  }
  return out;
}

AlgorithmConfig WithoutCommunication(const AlgorithmConfig& cfg) {
  AlgorithmConfig out = cfg;
  const int n = cfg.sensor_count();
  out.graph = CommunicationGraph(SwitchingGraphProcess(
      TopologySet(n, {Eigen::MatrixXd::Zero(n, n)}),
      MarkovChain(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1))));
  out.thresholds.clear();
  out.noise.clear();
  out.steps.mutable_edges().clear();
  return out;
}

WindowMean LateWindowMean(const MonteCarloResult& result, std::int64_t from,
                          std::int64_t to) {
  const auto horizon = static_cast<std::int64_t>(result.run_series.cols());
  if (from < 1 || to > horizon || from > to) {
    throw DomainError("late window [" + std::to_string(from) + ", " +
                      std::to_string(to) + "] outside 1.." +
                      std::to_string(horizon));
  }
  const auto repeats = result.run_series.rows();
  Eigen::VectorXd per_run =
      result.run_series.middleCols(from - 1, to - from + 1).rowwise().mean();
  WindowMean w;
  w.mean = per_run.mean();
  if (repeats > 1) {
    const double var =
        (per_run.array() - w.mean).square().sum() / (repeats - 1);
    w.std_error = std::sqrt(var / repeats);
  }
  return w;
}

RateFitResult SeriesSlope(const std::vector<double>& series, std::int64_t k_lo,
                          std::int64_t k_hi, int points) {
  if (k_hi > static_cast<std::int64_t>(series.size())) {
    throw DomainError("fit window ends after the series");
  }
  std::vector<double> ks, vs;
  for (std::int64_t k : LogGrid(k_lo, k_hi, points)) {
    ks.push_back(static_cast<double>(k));
    vs.push_back(series[k - 1]);
  }
  return RateFit(ks, vs, static_cast<double>(k_lo), static_cast<double>(k_hi));
}

TradeoffPoint TradeoffParams(double nu, double chi, double lambda_min_plus) {
  if (!(nu > 0.5 && nu < 1.0)) {
    throw DomainError("ν ∈ (1/2, 1) violated (ν = " + Fmt(nu) + ")");
  }
  if (!(chi >= 1.0 && chi < 2.0 * nu)) {
    throw DomainError("χ ∈ [1, 2ν) violated (χ = " + Fmt(chi) +
                      ", 2ν = " + Fmt(2.0 * nu) + ")");
  }
  if (!(lambda_min_plus > 0.0)) {
    throw DomainError("λ⁺_min must be positive");
  }
  TradeoffPoint p;
  p.nu = nu;
  p.chi = chi;
  p.delta = 1.0;
  p.eps = (chi - 1.0) / 2.0;
  p.gamma = (2.0 + nu - chi) / 2.0;
  p.beta1 = (2.0 - chi) / (2.0 * lambda_min_plus) + 1.0;
  p.k0 = DefaultWarmup(p.beta1, p.delta);
  return p;
}

AlgorithmConfig ApplyTradeoff(const AlgorithmConfig& base,
                              const TradeoffPoint& point, double alpha_base,
                              double noise_base_scale) {
  AlgorithmConfig cfg = base;
  const int m = cfg.edge_count();
  cfg.noise.assign(m, NoiseSchedule(NoiseFamily::kCauchy, noise_base_scale,
                                    point.eps));
  std::vector<EdgeStepSize> edges(m, EdgeStepSize{alpha_base, point.gamma});
  std::vector<SensorStepSize> sensors(
      cfg.sensor_count(), SensorStepSize{point.beta1, point.delta, point.k0});
  cfg.steps = StepSizeSchedule(std::move(edges), std::move(sensors));
  return cfg;
}

TradeoffReport TradeoffSweep(const AlgorithmConfig& base,
                             const Eigen::VectorXd& theta, double nu,
                             std::vector<double> chis,
                             const TradeoffOptions& options) {
  double lambda = std::numeric_limits<double>::infinity();
  for (const auto& s : base.sensors) {
    const SpectralInfo info = Spectral(s);
    if (info.lambda_min_plus) lambda = std::min(lambda, *info.lambda_min_plus);
  }
  if (!std::isfinite(lambda)) {
    throw DomainError("no sensor has a positive eigenvalue");
  }
  // Reject infeasible points before any simulation.
  std::vector<TradeoffPoint> points;
  for (double chi : chis) points.push_back(TradeoffParams(nu, chi, lambda));
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.chi < b.chi; });

  TradeoffReport report;
  for (const auto& p : points) {
    const AlgorithmConfig cfg = ApplyTradeoff(base, p, options.alpha_base,
                                              options.noise_base_scale);
    TradeoffEntry entry;
    entry.point = p;
    const FisherBoundConfig fb =
        MakeFisherBoundConfig(cfg, options.bound_sensor);
    const FisherBoundTrajectory traj = BuildTrajectory(
        fb, LogGrid(options.fit_lo, options.fit_hi, 60), BoundForm::kRate);
    std::vector<double> ks(traj.times.begin(), traj.times.end());
    entry.bound_slope = RateFit(ks, traj.scalar_series,
                                static_cast<double>(options.fit_lo),
                                static_cast<double>(options.fit_hi))
                            .slope;
    const MonteCarloResult mc = MonteCarlo(cfg, theta, options.monte_carlo);
    const std::int64_t horizon = options.monte_carlo.horizon;
    const std::int64_t hi = std::min(options.fit_hi, horizon);
    if (hi >= 10 * options.fit_lo) {
      entry.mse_slope = SeriesSlope(mc.mean_sq_error, options.fit_lo, hi).slope;
    } else {
      entry.mse_slope = std::nan("");
    }
    entry.late_mse = LateWindowMean(mc, std::max<std::int64_t>(1, horizon / 2),
                                    horizon);
    report.entries.push_back(entry);
  }

  const auto& e = report.entries;
  if (e.size() < 2) {
    report.verdict = "insufficient points";
    return report;
  }
  bool tie = false;
  report.bound_ordered = true;
  report.mse_ordered = true;
  for (std::size_t a = 0; a + 1 < e.size(); ++a) {
    if (e[a].point.chi == e[a + 1].point.chi) tie = true;
    if (!(e[a + 1].bound_slope < e[a].bound_slope)) report.bound_ordered = false;
    const double sep = 3.0 * std::hypot(e[a].late_mse.std_error,
                                        e[a + 1].late_mse.std_error);
    if (!(e[a + 1].late_mse.mean - e[a].late_mse.mean > sep)) {
      report.mse_ordered = false;
    }
  }
  if (tie) {
    report.verdict = "tie";
  } else if (report.bound_ordered && report.mse_ordered) {
    report.verdict = "monotone";
  } else {
    report.verdict = "not monotone";
  }
  return report;
}

HighdimResult HighdimCompare(const AlgorithmConfig& cfg,
                             const Eigen::VectorXd& theta,
                             const MonteCarloOptions& options) {
  AlgorithmConfig one = cfg;
  one.use_compression = true;
  AlgorithmConfig multi = cfg;
  multi.use_compression = false;
  HighdimResult out;
  out.one_bit = MonteCarlo(one, theta, options);
  out.multi_bit = MonteCarlo(multi, theta, options);
  const double n = cfg.dimension;
  for (double v : out.one_bit.mean_sq_error) {
    out.one_bit_normalized.push_back(v / n);
  }
  for (double v : out.multi_bit.mean_sq_error) {
    out.multi_bit_normalized.push_back(v / n);
  }
  return out;
}

EventRateResult EventRateSynthetic(const AlgorithmConfig& cfg,
                                   double theta_true,
                                   const MonteCarloOptions& options) {
  if (cfg.dimension != 1) {
    throw ValidationError("event-rate study needs a scalar parameter");
  }
  if (!(theta_true >= 0.0 && theta_true <= 1.0)) {
    throw ValidationError("event rate must lie in [0, 1]");
  }
  EventRateResult out;
  out.monte_carlo =
      MonteCarlo(cfg, Eigen::VectorXd::Constant(1, theta_true), options);
  out.mean_estimate = out.monte_carlo.final_mean_estimates.col(0).mean();
  out.abs_error = std::abs(out.mean_estimate - theta_true);
  return out;
}

Eigen::VectorXd UniformTheta(int n, std::uint64_t seed) {
  RandomStream rng(DeriveSeed(seed, 0, StreamPurpose::kAuxiliary));
  Eigen::VectorXd theta(n);
  for (int c = 0; c < n; ++c) theta(c) = 2.0 * rng.Uniform() - 1.0;
  return theta;
}

void WriteMetricsCsv(const std::string& path, const MonteCarloResult& result) {
  std::ofstream out = OpenOut(path);
  out << "k,mean_sq_error,stderr\n";
  for (std::size_t t = 0; t < result.mean_sq_error.size(); ++t) {
    out << (t + 1) << ',' << Fmt(result.mean_sq_error[t]) << ','
        << Fmt(result.std_error[t]) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void WritePrivacyCsv(const std::string& path, int sensor,
                     const FisherBoundTrajectory& traj) {
  std::ofstream out = OpenOut(path);
  out << "k,sensor,bound_scalar";
  const Eigen::Index rows = traj.bounds.empty() ? 0 : traj.bounds[0].rows();
  const Eigen::Index cols = traj.bounds.empty() ? 0 : traj.bounds[0].cols();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      out << ",b" << (r + 1) << '_' << (c + 1);
    }
  }
  out << ",pre_asymptotic\n";
  for (std::size_t p = 0; p < traj.times.size(); ++p) {
    out << traj.times[p] << ',' << (sensor + 1) << ','
        << Fmt(traj.scalar_series[p]);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        out << ',' << Fmt(traj.bounds[p](r, c));
      }
    }
    out << ',' << (traj.pre_asymptotic[p] ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void WriteTradeoffCsv(const std::string& path, const TradeoffReport& report) {
  std::ofstream out = OpenOut(path);
  out << "chi,bound_slope,mse_slope,late_mse,late_mse_stderr,nu,eps,gamma,"
         "beta1,k0\n";
  for (const auto& e : report.entries) {
    out << Fmt(e.point.chi) << ',' << Fmt(e.bound_slope) << ','
        << Fmt(e.mse_slope) << ',' << Fmt(e.late_mse.mean) << ','
        << Fmt(e.late_mse.std_error) << ',' << Fmt(e.point.nu) << ','
        << Fmt(e.point.eps) << ',' << Fmt(e.point.gamma) << ','
        << Fmt(e.point.beta1) << ',' << Fmt(e.point.k0) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void WriteRunCsv(const std::string& path, const RunResult& run) {
  std::ofstream out = OpenOut(path);
  out << "k,sensor,sq_error,bits_sent\n";
  for (Eigen::Index t = 0; t < run.sq_error.rows(); ++t) {
    for (Eigen::Index i = 0; i < run.sq_error.cols(); ++i) {
      out << (t + 1) << ',' << (i + 1) << ',' << Fmt(run.sq_error(t, i)) << ','
          << run.bits(t, i) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace privest
