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

// YAML configuration files. Vertex and sensor ids are 1-based in files and
// 0-based in memory.
//
//   dimension: 2
//   theta: [1, -1]
//   graph:
//     vertices: 8
//     topologies:
//       - edges: [[1, 2, 1], [3, 4, 1]]
//     transition: [[1]]
//     initial: [1]            # optional, defaults to the stationary law
//   sensors:
//     - {mean_matrix: [[1, 0]], active_matrix: [[2, 0]],
//        failure_probability: 0.5, obs_noise_std: 1}
//   algorithm:
//     use_compression: true
//     threshold_default: 0
//     noise: {family: gaussian, base_scale: 1, growth_exponent: 0.15}
//     alpha: {base: 3, gamma: 0.8}
//     beta: {base: 3, delta: 1}   # optional k0
//   experiment: {repeats: 20, horizon: 100000, seed: 1}
//
// See configs/ for complete files, including independent per-link chains,
// per-edge and per-sensor overrides and Bernoulli event sensors.

#ifndef PRIVEST_CONFIG_H_
#define PRIVEST_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "privest/estimator.h"

namespace privest {

struct ExperimentSettings {
  int repeats = 20;
  std::int64_t horizon = 100000;
  std::optional<std::uint64_t> seed;
};

struct LoadedConfig {
  std::string source;
  AlgorithmConfig algorithm;
  Eigen::VectorXd theta;
  ExperimentSettings experiment;
};

// Throws ConfigError (with file, line and key) for syntax errors, missing
// keys and type mismatches; ValidationError for well-typed but invalid
// models.
LoadedConfig LoadConfigFile(const std::string& path);
LoadedConfig LoadConfigString(const std::string& text,
                              const std::string& source = "<string>");

}  // namespace privest

#endif  // PRIVEST_CONFIG_H_
