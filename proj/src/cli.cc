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

#include "privest/cli.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "privest/config.h"
#include "privest/errors.h"
#include "privest/experiments.h"
#include "privest/privacy_analysis.h"

namespace privest {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Common {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::optional<int> repeats;
  std::optional<std::int64_t> horizon;
};

std::uint64_t ResolveSeed(const Common& c, const LoadedConfig& cfg) {
  if (c.seed) return *c.seed;
  if (cfg.experiment.seed) return *cfg.experiment.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

MonteCarloOptions McOptions(const Common& c, const LoadedConfig& cfg,
                            std::uint64_t seed) {
  MonteCarloOptions o;
  o.repeats = c.repeats.value_or(cfg.experiment.repeats);
  o.horizon = c.horizon.value_or(cfg.experiment.horizon);
  o.seed = seed;
  o.jobs = c.jobs;
  return o;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::filesystem::path PrepareOut(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir +
                  "': " + ec.message());
  }
  return std::filesystem::path(dir);
}

void WriteJson(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void WriteManifest(const std::filesystem::path& dir, const std::string& command,
                   const Common& c, std::optional<std::uint64_t> seed,
                   bool seed_generated, Clock::time_point start,
                   const Json& extra = Json::object()) {
  Json m;
  m["command"] = command;
  m["config"] = c.config;
  if (seed) {
    m["seed"] = *seed;
    m["seed_generated"] = seed_generated;
  }
  m["output_directory"] = c.out_dir;
  m["tool_version"] = PRIVEST_VERSION;
  m["jobs"] = c.jobs > 0 ? c.jobs
                         : static_cast<int>(std::thread::hardware_concurrency());
  m["written_utc"] = UtcNow();
  m["wall_clock_seconds"] =
      std::chrono::duration<double>(Clock::now() - start).count();
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  WriteJson(dir / "manifest.json", m);
}

void AddCommon(CLI::App* app, Common& c, bool monte_carlo) {
  app->add_option("config", c.config, "YAML configuration file")->required();
  app->add_option("--out", c.out_dir, "Output directory");
  if (monte_carlo) {
    app->add_option("--seed", c.seed, "Root seed (generated when omitted)");
    app->add_option("--jobs", c.jobs, "Worker threads (default: all cores)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--repeats", c.repeats, "Independent runs")
        ->check(CLI::PositiveNumber);
    app->add_option("--horizon", c.horizon, "Steps per run")
        ->check(CLI::PositiveNumber);
  }
}

int CmdValidate(const Common& c, std::ostream& out) {
  const LoadedConfig cfg = LoadConfigFile(c.config);
  const AssumptionReport report = ValidateAssumptions(cfg.algorithm);
  for (const auto& check : report.checks) {
    out << (check.passed ? "PASS " : "FAIL ") << check.name;
    if (!check.detail.empty()) out << ": " << check.detail;
    out << '\n';
  }
  out << (report.all_passed() ? "all assumptions hold\n"
                              : "some assumptions fail\n");
  return report.all_passed() ? kExitOk : kExitValidation;
}

void WarnAssumptions(const AlgorithmConfig& cfg, std::ostream& err) {
  for (const auto& check : ValidateAssumptions(cfg).checks) {
    if (!check.passed) {
      err << "warning: assumption not met: " << check.name;
      if (!check.detail.empty()) err << ": " << check.detail;
      err << '\n';
    }
  }
}

int CmdSimulate(const Common& c, bool baseline, bool run_csv, std::ostream& out,
                std::ostream& err) {
  const auto start = Clock::now();
  const LoadedConfig cfg = LoadConfigFile(c.config);
  const bool generated = !c.seed && !cfg.experiment.seed;
  const std::uint64_t seed = ResolveSeed(c, cfg);
  const MonteCarloOptions opt = McOptions(c, cfg, seed);
  WarnAssumptions(cfg.algorithm, err);
  const auto dir = PrepareOut(c.out_dir);
  const MonteCarloResult mc = MonteCarlo(cfg.algorithm, cfg.theta, opt);
  WriteMetricsCsv((dir / "metrics.csv").string(), mc);
  Json extra;
  extra["repeats"] = opt.repeats;
  extra["horizon"] = opt.horizon;
  extra["total_bits"] = mc.total_bits;
  extra["final_mean_sq_error"] = mc.mean_sq_error.back();
  if (baseline) {
    const MonteCarloResult b =
        MonteCarlo(WithoutCommunication(cfg.algorithm), cfg.theta, opt);
    WriteMetricsCsv((dir / "baseline_metrics.csv").string(), b);
    extra["baseline_final_mean_sq_error"] = b.mean_sq_error.back();
  }
  if (run_csv) {
    WriteRunCsv((dir / "run.csv").string(),
                Run(cfg.algorithm, cfg.theta, opt.horizon, seed, 0));
  }
  WriteManifest(dir, "simulate", c, seed, generated, start, extra);
  out << "final mean squared error " << mc.mean_sq_error.back() << " at k = "
      << opt.horizon << " (seed " << seed << ")\n";
  return kExitOk;
}

int CmdPrivacyBound(const Common& c, int sensor, std::int64_t kmin,
                    std::int64_t kmax, int points, const std::string& form_name,
                    std::ostream& out) {
  const auto start = Clock::now();
  const BoundForm form = ParseForm(form_name);
  const LoadedConfig cfg = LoadConfigFile(c.config);
  if (sensor < 1 || sensor > cfg.algorithm.sensor_count()) {
    throw ValidationError("--sensor must be in 1.." +
                          std::to_string(cfg.algorithm.sensor_count()));
  }
  const bool stationary = cfg.algorithm.graph.StartsStationary();
  if (form == BoundForm::kRate && !stationary) {
    throw DomainError("rate form requires a stationary initial topology law "
                      "(p_{u,1} = π_u)");
  }
  const FisherBoundConfig fb = MakeFisherBoundConfig(
      cfg.algorithm, sensor - 1, stationary ? 0 : std::max<std::int64_t>(kmax, 1));
  fb.CheckConditions();
  std::int64_t lo = std::max<std::int64_t>(kmin, 1);
  if (form == BoundForm::kRate && fb.beta.delta == 1.0) {
    lo = std::max<std::int64_t>(lo, 2);
  }
  const FisherBoundTrajectory traj =
      BuildTrajectory(fb, LogGrid(lo, kmax, points), form);
  const auto dir = PrepareOut(c.out_dir);
  WritePrivacyCsv((dir / "privacy.csv").string(), sensor - 1, traj);

  Json summary;
  summary["sensor"] = sensor;
  summary["form"] = FormName(form);
  const std::int64_t fit_lo = kmax >= 10000 ? 1000 : lo;
  std::vector<double> ks(traj.times.begin(), traj.times.end());
  bool all_zero = std::all_of(traj.scalar_series.begin(),
                              traj.scalar_series.end(),
                              [](double v) { return v == 0.0; });
  if (!all_zero && kmax >= 10 * fit_lo) {
    const RateFitResult fit =
        RateFit(ks, traj.scalar_series, fit_lo, static_cast<double>(kmax));
    summary["fit_window"] = {fit_lo, kmax};
    summary["slope"] = fit.slope;
    summary["slope_halfwidth95"] = fit.halfwidth;
    out << "fitted slope " << fit.slope << " ± " << fit.halfwidth << " on ["
        << fit_lo << ", " << kmax << "]\n";
  }
  if (all_zero) out << "all bounds are zero\n";
  if (traj.times.size() >= 10) {
    const DynamicEnhancementResult de = DynamicEnhancementCheck(traj);
    summary["dynamically_enhanced"] = de.holds;
    if (de.first_violation) summary["first_violation"] = *de.first_violation;
    out << "dynamically enhanced privacy: " << (de.holds ? "yes" : "no")
        << '\n';
  }
  WriteJson(dir / "summary.json", summary);
  WriteManifest(dir, "privacy-bound", c, std::nullopt, false, start);
  return kExitOk;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

int CmdTradeoff(const Common& c, double nu, const std::string& chi_list,
                double alpha_base, std::ostream& out) {
  const auto start = Clock::now();
  const std::vector<double> chis = ParseList(chi_list);
  const LoadedConfig cfg = LoadConfigFile(c.config);
  const bool generated = !c.seed && !cfg.experiment.seed;
  const std::uint64_t seed = ResolveSeed(c, cfg);
  TradeoffOptions opt;
  opt.monte_carlo = McOptions(c, cfg, seed);
  opt.alpha_base = alpha_base;
  opt.fit_hi = std::min<std::int64_t>(opt.fit_hi, opt.monte_carlo.horizon);
  if (opt.fit_hi < 10 * opt.fit_lo) {
    opt.fit_lo = std::max<std::int64_t>(1, opt.fit_hi / 10);
  }
  const auto dir = PrepareOut(c.out_dir);
  const TradeoffReport report =
      TradeoffSweep(cfg.algorithm, cfg.theta, nu, chis, opt);
  WriteTradeoffCsv((dir / "tradeoff.csv").string(), report);
  for (const auto& e : report.entries) {
    out << "chi " << e.point.chi << ": bound slope " << e.bound_slope
        << ", mse slope " << e.mse_slope << ", late mse " << e.late_mse.mean
        << " ± " << e.late_mse.std_error << '\n';
  }
  out << "verdict: " << report.verdict << '\n';
  Json extra;
  extra["nu"] = nu;
  extra["chi"] = chis;
  extra["verdict"] = report.verdict;
  WriteManifest(dir, "tradeoff", c, seed, generated, start, extra);
  return kExitOk;
}

int CmdHighdim(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  const LoadedConfig cfg = LoadConfigFile(c.config);
  const bool generated = !c.seed && !cfg.experiment.seed;
  const std::uint64_t seed = ResolveSeed(c, cfg);
  const MonteCarloOptions opt = McOptions(c, cfg, seed);
  const auto dir = PrepareOut(c.out_dir);
  const HighdimResult r = HighdimCompare(cfg.algorithm, cfg.theta, opt);
  {
    std::ofstream csv(dir / "highdim.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write highdim.csv");
    csv << "k,one_bit_mse,multi_bit_mse\n";
    char buf[80];
    for (std::size_t t = 0; t < r.one_bit_normalized.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", t + 1,
                    r.one_bit_normalized[t], r.multi_bit_normalized[t]);
      csv << buf;
    }
  }
  out << "final per-coordinate mse: 1-bit " << r.one_bit_normalized.back()
      << ", multi-bit " << r.multi_bit_normalized.back() << '\n';
  Json extra;
  extra["one_bit_total_bits"] = r.one_bit.total_bits;
  extra["multi_bit_total_bits"] = r.multi_bit.total_bits;
  WriteManifest(dir, "highdim-compare", c, seed, generated, start, extra);
  return kExitOk;
}

int CmdEventRate(const Common& c, std::optional<double> theta_true,
                 std::ostream& out) {
  const auto start = Clock::now();
  const LoadedConfig cfg = LoadConfigFile(c.config);
  const bool generated = !c.seed && !cfg.experiment.seed;
  const std::uint64_t seed = ResolveSeed(c, cfg);
  const MonteCarloOptions opt = McOptions(c, cfg, seed);
  const double truth = theta_true.value_or(cfg.theta.size() == 1 ? cfg.theta(0)
                                                                 : 0.0);
  const auto dir = PrepareOut(c.out_dir);
  const EventRateResult r = EventRateSynthetic(cfg.algorithm, truth, opt);
  WriteMetricsCsv((dir / "metrics.csv").string(), r.monte_carlo);
  out << "mean estimate " << r.mean_estimate << " (true " << truth
      << ", |error| " << r.abs_error << ")\n";
  Json extra;
  extra["theta_true"] = truth;
  extra["mean_estimate"] = r.mean_estimate;
  extra["abs_error"] = r.abs_error;
  WriteManifest(dir, "event-rate", c, seed, generated, start, extra);
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy-preserving distributed estimation with binary-valued "
               "communication",
               "privest"};
  app.set_version_flag("--version", PRIVEST_VERSION);
  app.require_subcommand(1);

  Common common;
  auto* validate = app.add_subcommand("validate", "Check model assumptions");
  AddCommon(validate, common, false);

  bool baseline = false, run_csv = false;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
  AddCommon(simulate, common, true);
  simulate->add_flag("--baseline", baseline,
                     "Also simulate with communication disabled");
  simulate->add_flag("--run-csv", run_csv,
                     "Write per-sensor series of run 0 to run.csv");

  int sensor = 1;
  std::int64_t kmin = 1, kmax = 100000;
  int points = 60;
  std::string form = "rate";
  auto* privacy = app.add_subcommand("privacy-bound", "Fisher-information bounds");
  AddCommon(privacy, common, false);
  privacy->add_option("--sensor", sensor, "Sensor id (1-based)");
  privacy->add_option("--kmin", kmin, "First time")->check(CLI::PositiveNumber);
  privacy->add_option("--kmax", kmax, "Last time")->check(CLI::PositiveNumber);
  privacy->add_option("--points", points, "Log-grid points")
      ->check(CLI::PositiveNumber);
  privacy->add_option("--form", form, "general or rate")
      ->check(CLI::IsMember({"general", "rate"}));

  double nu = 0.96, alpha_base = 3.0;
  std::string chi_list = "1.3,1.6,1.9";
  auto* tradeoff = app.add_subcommand("tradeoff", "Privacy/convergence sweep");
  AddCommon(tradeoff, common, true);
  tradeoff->add_option("--nu", nu, "Convergence exponent in (1/2, 1)");
  tradeoff->add_option("--chi-list", chi_list, "Comma-separated chi values");
  tradeoff->add_option("--alpha-base", alpha_base, "alpha_{ij,1}");

  auto* highdim =
      app.add_subcommand("highdim-compare", "1-bit versus multi-bit variant");
  AddCommon(highdim, common, true);

  std::optional<double> theta_true;
  auto* event = app.add_subcommand("event-rate", "Synthetic event-rate study");
  AddCommon(event, common, true);
  event->add_option("--theta-true", theta_true, "True event rate");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*validate) return CmdValidate(common, out);
    if (*simulate) return CmdSimulate(common, baseline, run_csv, out, err);
    if (*privacy) {
      return CmdPrivacyBound(common, sensor, kmin, kmax, points, form, out);
    }
    if (*tradeoff) return CmdTradeoff(common, nu, chi_list, alpha_base, out);
    if (*highdim) return CmdHighdim(common, out);
    if (*event) return CmdEventRate(common, theta_true, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitIo;
}

}  // namespace privest
