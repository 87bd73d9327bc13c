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

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "privest/cli.h"
#include "privest/config.h"
#include "privest/errors.h"
#include "privest/estimator.h"
#include "privest/experiments.h"
#include "privest/graph_model.h"
#include "privest/noise_models.h"
#include "privest/privacy_analysis.h"

namespace py = pybind11;

namespace privest {
namespace {

std::vector<double> Times(const std::vector<std::int64_t>& ks) {
  return {ks.begin(), ks.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed estimation with binary-valued, noise-perturbed "
            "communication and Fisher-information privacy bounds.";
  m.attr("__version__") = PRIVEST_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::enum_<NoiseFamily>(m, "NoiseFamily")
      .value("GAUSSIAN", NoiseFamily::kGaussian)
      .value("LAPLACE", NoiseFamily::kLaplace)
      .value("CAUCHY", NoiseFamily::kCauchy);

  py::class_<NoiseSchedule>(m, "NoiseSchedule")
      .def(py::init<NoiseFamily, double, double>(), py::arg("family"),
           py::arg("base_scale"), py::arg("growth_exponent") = 0.0)
      .def("scale", &NoiseSchedule::Scale, py::arg("k"))
      .def("density", &NoiseSchedule::Density, py::arg("k"), py::arg("x"))
      .def("cdf", &NoiseSchedule::Cdf, py::arg("k"), py::arg("x"))
      .def("eta", &NoiseSchedule::Eta, py::arg("k"))
      .def("zeta", &NoiseSchedule::Zeta, py::arg("k"));

  m.def(
      "eta_numeric",
      [](const NoiseSchedule& s, std::int64_t k, double halfwidth,
         std::int64_t points) {
        const EtaNumericResult r = EtaNumeric(s, k, halfwidth, points);
        return py::make_tuple(r.value, r.argmax, r.coarse_grid);
      },
      py::arg("schedule"), py::arg("k"), py::arg("halfwidth"),
      py::arg("points") = 1000000,
      "Grid maximum of f²/(F(1−F)); returns (value, argmax, coarse_grid).");

  m.def("improvement_factor", &ImprovementFactor, py::arg("family"));

  py::class_<LoadedConfig>(m, "Config")
      .def_property_readonly("source", [](const LoadedConfig& c) { return c.source; })
      .def_property_readonly("theta", [](const LoadedConfig& c) { return c.theta; })
      .def_property_readonly("dimension",
                             [](const LoadedConfig& c) { return c.algorithm.dimension; })
      .def_property_readonly(
          "sensor_count", [](const LoadedConfig& c) { return c.algorithm.sensor_count(); })
      .def_property_readonly("repeats",
                             [](const LoadedConfig& c) { return c.experiment.repeats; })
      .def_property_readonly("horizon",
                             [](const LoadedConfig& c) { return c.experiment.horizon; })
      .def_property_readonly("seed",
                             [](const LoadedConfig& c) { return c.experiment.seed; })
      .def(
          "stationary_distribution",
          [](const LoadedConfig& c) -> Eigen::VectorXd {
            const auto* s = c.algorithm.graph.switching();
            if (s == nullptr) {
              throw DomainError("independent-link graphs have no global chain");
            }
            return StationaryDistribution(s->chain());
          })
      .def(
          "validate",
          [](const LoadedConfig& c) {
            py::list out;
            for (const auto& check : ValidateAssumptions(c.algorithm).checks) {
              out.append(py::make_tuple(check.name, check.passed, check.detail));
            }
            return out;
          },
          "List of (check, passed, detail).")
      .def(
          "run",
          [](const LoadedConfig& c, std::int64_t horizon, std::uint64_t seed,
             std::uint64_t run) {
            const RunResult r = Run(c.algorithm, c.theta, horizon, seed, run);
            return py::make_tuple(r.sq_error, r.total_bits);
          },
          py::arg("horizon"), py::arg("seed"), py::arg("run") = 0,
          "Single run; returns (squared errors T×N, total bits).")
      .def(
          "monte_carlo",
          [](const LoadedConfig& c, int repeats, std::int64_t horizon,
             std::uint64_t seed, int jobs, bool communicate) {
            MonteCarloOptions o{repeats, horizon, seed, jobs};
            MonteCarloResult r;
            {
              py::gil_scoped_release release;
              r = communicate
                      ? MonteCarlo(c.algorithm, c.theta, o)
                      : MonteCarlo(WithoutCommunication(c.algorithm), c.theta, o);
            }
            return py::make_tuple(r.mean_sq_error, r.std_error);
          },
          py::arg("repeats"), py::arg("horizon"), py::arg("seed"),
          py::arg("jobs") = 0, py::arg("communicate") = true,
          "Returns (mean squared error per k, standard error per k).")
      .def(
          "privacy_bound",
          [](const LoadedConfig& c, int sensor, std::vector<std::int64_t> ks,
             const std::string& form) {
            const FisherBoundConfig fb = MakeFisherBoundConfig(c.algorithm, sensor - 1);
            const auto traj = BuildTrajectory(fb, ks, ParseForm(form));
            return py::make_tuple(Times(traj.times), traj.scalar_series);
          },
          py::arg("sensor"), py::arg("ks"), py::arg("form") = "rate",
          "Scalar bound series for a 1-based sensor id.");

  m.def("load_config", &LoadConfigFile, py::arg("path"));
  m.def("load_config_string", &LoadConfigString, py::arg("text"),
        py::arg("source") = "<string>");

  m.def("log_grid", &LogGrid, py::arg("lo"), py::arg("hi"), py::arg("points"));
  m.def(
      "rate_fit",
      [](const std::vector<double>& ks, const std::vector<double>& vals,
         double lo, double hi) {
        const RateFitResult r = RateFit(ks, vals, lo, hi);
        return py::make_tuple(r.slope, r.halfwidth);
      },
      py::arg("ks"), py::arg("values"), py::arg("k_lo"), py::arg("k_hi"));

  m.def(
      "tradeoff_params",
      [](double nu, double chi, double lambda_min_plus) {
        const TradeoffPoint p = TradeoffParams(nu, chi, lambda_min_plus);
        py::dict d;
        d["nu"] = p.nu;
        d["chi"] = p.chi;
        d["delta"] = p.delta;
        d["eps"] = p.eps;
        d["gamma"] = p.gamma;
        d["beta1"] = p.beta1;
        d["k0"] = p.k0;
        return d;
      },
      py::arg("nu"), py::arg("chi"), py::arg("lambda_min_plus") = 1.0);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = RunCli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool; returns (exit, stdout, stderr).");
}

}  // namespace privest
