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

#include "privest/noise_models.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "privest/errors.h"

namespace privest {

using std::numbers::pi;

std::string_view FamilyName(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian:
      return "gaussian";
    case NoiseFamily::kLaplace:
      return "laplace";
    case NoiseFamily::kCauchy:
      return "cauchy";
  }
  return "unknown";
}

NoiseFamily ParseFamily(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "laplace") return NoiseFamily::kLaplace;
  if (name == "cauchy") return NoiseFamily::kCauchy;
  throw ValidationError("unknown noise family '" + std::string(name) +
                        "' (expected gaussian, laplace or cauchy)");
}

NoiseSchedule::NoiseSchedule(NoiseFamily family, double base_scale,
                             double growth_exponent)
    : family_(family),
      base_scale_(base_scale),
      growth_exponent_(growth_exponent) {
  if (!(base_scale > 0.0) || !std::isfinite(base_scale)) {
    throw ValidationError("noise base_scale must be positive");
  }
  if (!(growth_exponent >= 0.0) || !std::isfinite(growth_exponent)) {
    throw ValidationError("noise growth_exponent must be nonnegative");
  }
}

double NoiseSchedule::Scale(std::int64_t k) const {
  if (growth_exponent_ == 0.0) return base_scale_;
  return base_scale_ * std::pow(static_cast<double>(k), growth_exponent_);
}

double NoiseSchedule::Density(std::int64_t k, double x) const {
  const double s = Scale(k);
  const double z = x / s;
  switch (family_) {
    case NoiseFamily::kGaussian:
      return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * pi) * s);
    case NoiseFamily::kLaplace:
      return std::exp(-std::abs(z)) / (2.0 * s);
    case NoiseFamily::kCauchy:
      return 1.0 / (pi * s * (1.0 + z * z));
  }
  return 0.0;
}

double NoiseSchedule::Cdf(std::int64_t k, double x) const {
  const double z = x / Scale(k);
  switch (family_) {
    case NoiseFamily::kGaussian:
      return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    case NoiseFamily::kLaplace:
      return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    case NoiseFamily::kCauchy:
      // atan form loses the lower tail; use the reflected expression there.
      if (z < -1.0) return std::atan(-1.0 / z) / pi;
      return 0.5 + std::atan(z) / pi;
  }
  return 0.0;
}

double NoiseSchedule::Sample(std::int64_t k, RandomStream& rng) const {
  const double s = Scale(k);
  switch (family_) {
    case NoiseFamily::kGaussian:
      return s * rng.StandardNormal();
    case NoiseFamily::kLaplace: {
      const double u = rng.Uniform() - 0.5;
      const double mag = -std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -s * mag : s * mag;
    }
    case NoiseFamily::kCauchy:
      return s * std::tan(pi * (rng.Uniform() - 0.5));
  }
  return 0.0;
}

double NoiseSchedule::Eta(std::int64_t k) const {
  const double s = Scale(k);
  switch (family_) {
    case NoiseFamily::kGaussian:
      return 2.0 / (pi * s * s);
    case NoiseFamily::kLaplace:
      return 1.0 / (s * s);
    case NoiseFamily::kCauchy:
      return 4.0 / (pi * pi * s * s);
  }
  return 0.0;
}

double NoiseSchedule::Zeta(std::int64_t k) const {
  return base_scale_ / Scale(k);
}

EtaNumericResult EtaNumeric(const NoiseSchedule& schedule, std::int64_t k,
                            double grid_halfwidth, std::int64_t grid_points) {
  EtaNumericResult result;
  result.coarse_grid = grid_points < 1000;
  const std::int64_t points = std::max<std::int64_t>(grid_points, 2);
  const double step = 2.0 * grid_halfwidth / static_cast<double>(points - 1);
  result.value = -1.0;
  for (std::int64_t p = 0; p < points; ++p) {
    const double x = -grid_halfwidth + step * static_cast<double>(p);
    const double f = schedule.Density(k, x);
    // F(x)(1 - F(x)) = F(x) F(-x) for the symmetric families; this avoids
    // cancellation in the upper tail.
    const double denom =
        std::max(schedule.Cdf(k, x) * schedule.Cdf(k, -x), 1e-300);
    const double ratio = f * f / denom;
    if (ratio > result.value) {
      result.value = ratio;
      result.argmax = x;
    }
  }
  return result;
}

bool ScheduleFeasible(double eps) { return eps <= 0.5; }

}  // namespace privest
