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

// Privacy-noise families with polynomially growing scale
// scale(k) = base_scale * k^growth_exponent, together with the constants
// eta_k = sup_x f_k(x)^2 / (F_k(x) (1 - F_k(x))) and zeta_k = scale(1)/scale(k)
// that drive the privacy and convergence analysis.

#ifndef PRIVEST_NOISE_MODELS_H_
#define PRIVEST_NOISE_MODELS_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "privest/random.h"

namespace privest {

enum class NoiseFamily { kGaussian, kLaplace, kCauchy };

std::string_view FamilyName(NoiseFamily family);
// Accepts "gaussian", "laplace", "cauchy"; throws ValidationError otherwise.
NoiseFamily ParseFamily(std::string_view name);

class NoiseSchedule {
 public:
  NoiseSchedule(NoiseFamily family, double base_scale, double growth_exponent);

  NoiseFamily family() const { return family_; }
  double base_scale() const { return base_scale_; }
  double growth_exponent() const { return growth_exponent_; }

  // sigma_k, b_k or r_k depending on the family.
  double Scale(std::int64_t k) const;

  double Density(std::int64_t k, double x) const;
  double Cdf(std::int64_t k, double x) const;
  double Sample(std::int64_t k, RandomStream& rng) const;

  // Closed forms: Gaussian 2/(pi s^2), Laplace 1/s^2, Cauchy 4/(pi^2 s^2).
  double Eta(std::int64_t k) const;
  // scale(1) / scale(k) = k^-growth_exponent.
  double Zeta(std::int64_t k) const;

  bool operator==(const NoiseSchedule&) const = default;

 private:
  NoiseFamily family_;
  double base_scale_;
  double growth_exponent_;
};

struct EtaNumericResult {
  double value = 0.0;
  double argmax = 0.0;
  // Set when the grid is too coarse for the value to be trusted.
  bool coarse_grid = false;
};

// Grid maximum of f^2/(F(1-F)) over [-halfwidth, halfwidth]. Test oracle for
// NoiseSchedule::Eta. The denominator is floored at 1e-300.
EtaNumericResult EtaNumeric(const NoiseSchedule& schedule, std::int64_t k,
                            double grid_halfwidth, std::int64_t grid_points);

// Whether step sizes meeting the stochastic-approximation conditions exist
// for noise growing like k^eps: true iff eps <= 1/2.
bool ScheduleFeasible(double eps);

}  // namespace privest

#endif  // PRIVEST_NOISE_MODELS_H_
