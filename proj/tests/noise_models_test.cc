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
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "privest/errors.h"
#include "privest/random.h"

namespace privest {
namespace {

using std::numbers::pi;

const NoiseFamily kFamilies[] = {NoiseFamily::kGaussian, NoiseFamily::kLaplace,
                                 NoiseFamily::kCauchy};

TEST(Density, ClosedFormValues) {
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kGaussian, 1, 0).Density(1, 0.0),
              0.3989423, 1e-7);
  EXPECT_DOUBLE_EQ(NoiseSchedule(NoiseFamily::kLaplace, 2, 0).Density(1, 0.0),
                   0.25);
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kCauchy, 1, 0).Density(1, 1.0),
              0.1591549, 1e-7);
}

TEST(Density, IntegratesToOne) {
  using boost::math::quadrature::gauss_kronrod;
  for (NoiseFamily f : {NoiseFamily::kGaussian, NoiseFamily::kLaplace}) {
    const NoiseSchedule s(f, 1.7, 0.2);
    const std::int64_t k = 9;
    const double w = 60.0 * s.Scale(k);
    auto dens = [&](double x) { return s.Density(k, x); };
    const double total = gauss_kronrod<double, 61>::integrate(dens, -w, 0.0) +
                         gauss_kronrod<double, 61>::integrate(dens, 0.0, w);
    EXPECT_NEAR(total, 1.0, 1e-6) << FamilyName(f);
  }
  const NoiseSchedule c(NoiseFamily::kCauchy, 1.3, 0.1);
  const double x = 1e6 * c.Scale(4);
  EXPECT_NEAR(c.Cdf(4, x) - c.Cdf(4, -x), 1.0, 1e-5);
}

TEST(Cdf, ClosedFormValues) {
  for (NoiseFamily f : kFamilies) {
    EXPECT_DOUBLE_EQ(NoiseSchedule(f, 1.3, 0.2).Cdf(7, 0.0), 0.5);
  }
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kCauchy, 1, 0).Cdf(1, 1.0), 0.75,
              1e-15);
}

TEST(Cdf, GaussianQuantileAgreesWithIntegratedDensity) {
  const NoiseSchedule s(NoiseFamily::kGaussian, 1, 0);
  using boost::math::quadrature::gauss_kronrod;
  auto dens = [&](double x) { return s.Density(1, x); };
  const double oracle =
      0.5 + gauss_kronrod<double, 61>::integrate(dens, 0.0, 1.959964);
  EXPECT_NEAR(s.Cdf(1, 1.959964), 0.975, 1e-6);
  EXPECT_NEAR(s.Cdf(1, 1.959964), oracle, 1e-12);
}

TEST(Cdf, MonotoneAndSymmetric) {
  for (NoiseFamily f : kFamilies) {
    const NoiseSchedule s(f, 0.8, 0.3);
    double prev = 0.0;
    for (double x = -50.0; x <= 50.0; x += 0.01) {
      const double c = s.Cdf(5, x);
      EXPECT_GE(c, prev) << FamilyName(f) << " x = " << x;
      EXPECT_NEAR(s.Cdf(5, -x), 1.0 - c, 1e-12) << FamilyName(f);
      prev = c;
    }
  }
}

TEST(Sample, GaussianKolmogorovSmirnov) {
  const NoiseSchedule s(NoiseFamily::kGaussian, 2.0, 0.15);
  RandomStream rng(11);
  const int n = 100000;
  std::vector<double> draws(n);
  for (double& d : draws) d = s.Sample(30, rng);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int a = 0; a < n; ++a) {
    const double c = s.Cdf(30, draws[a]);
    ks = std::max({ks, std::abs(c - static_cast<double>(a) / n),
                   std::abs(c - static_cast<double>(a + 1) / n)});
  }
  // Asymptotic 0.001 critical value of the one-sample KS statistic.
  EXPECT_LT(ks, 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST(Sample, LaplaceMedianAndCauchyQuartile) {
  RandomStream rng(12);
  const int n = 100000;
  const NoiseSchedule lap(NoiseFamily::kLaplace, 1.0, 0.0);
  std::vector<double> draws(n);
  for (double& d : draws) d = lap.Sample(1, rng);
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  EXPECT_NEAR(draws[n / 2], 0.0, 0.02);

  const NoiseSchedule cau(NoiseFamily::kCauchy, 1.0, 0.0);
  int below = 0;
  for (int a = 0; a < n; ++a) below += cau.Sample(1, rng) < 1.0;
  EXPECT_NEAR(static_cast<double>(below) / n, 0.75, 0.01);
}

TEST(Eta, ClosedForms) {
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kGaussian, 1, 0).Eta(1), 2.0 / pi,
              1e-15);
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kGaussian, 1, 0).Eta(1), 0.6366198,
              1e-7);
  EXPECT_DOUBLE_EQ(NoiseSchedule(NoiseFamily::kLaplace, 1, 0).Eta(1), 1.0);
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kCauchy, 1, 0).Eta(1), 0.4052847,
              1e-7);
}

TEST(Eta, ScalesAsInverseSquareScale) {
  for (NoiseFamily f : kFamilies) {
    const NoiseSchedule s(f, 1.4, 0.37);
    const double ref = s.Eta(1) * s.Scale(1) * s.Scale(1);
    for (std::int64_t k : {2, 17, 1000, 123456}) {
      EXPECT_NEAR(s.Eta(k) * s.Scale(k) * s.Scale(k), ref, 1e-12 * ref);
    }
  }
}

TEST(EtaNumeric, MatchesClosedFormsAtTheOrigin) {
  const NoiseSchedule g(NoiseFamily::kGaussian, 1, 0);
  EXPECT_NEAR(EtaNumeric(g, 1, 10.0, 100000).value, 2.0 / pi, 1e-6);

  const auto lap = EtaNumeric(NoiseSchedule(NoiseFamily::kLaplace, 1, 0), 1,
                              10.0, 100001);
  EXPECT_DOUBLE_EQ(lap.argmax, 0.0);
  EXPECT_DOUBLE_EQ(lap.value, 1.0);

  const auto cau = EtaNumeric(NoiseSchedule(NoiseFamily::kCauchy, 1, 0), 1,
                              10.0, 100001);
  EXPECT_DOUBLE_EQ(cau.argmax, 0.0);
  EXPECT_NEAR(cau.value, 4.0 / (pi * pi), 1e-15);
  EXPECT_FALSE(cau.coarse_grid);
  EXPECT_TRUE(EtaNumeric(g, 1, 10.0, 999).coarse_grid);
}

TEST(EtaNumeric, NeverExceedsClosedFormOnRandomSchedules) {
  RandomStream rng(13);
  for (NoiseFamily f : kFamilies) {
    for (int t = 0; t < 20; ++t) {
      const NoiseSchedule s(f, 0.2 + 3.0 * rng.Uniform(),
                            0.5 * rng.Uniform());
      const auto k = static_cast<std::int64_t>(1 + 1000 * rng.Uniform());
      const double eta = s.Eta(k);
      const double num = EtaNumeric(s, k, 20.0 * s.Scale(k), 1000000).value;
      EXPECT_LE(num, eta + 1e-9);
      EXPECT_LE(eta - num, 1e-4 * eta);
    }
  }
}

TEST(Zeta, Values) {
  EXPECT_DOUBLE_EQ(NoiseSchedule(NoiseFamily::kGaussian, 2, 0).Zeta(1000), 1.0);
  EXPECT_NEAR(NoiseSchedule(NoiseFamily::kGaussian, 1, 0.15).Zeta(100), 0.5012,
              1e-4);
  EXPECT_DOUBLE_EQ(NoiseSchedule(NoiseFamily::kCauchy, 3, 0.5).Zeta(4), 0.5);
  for (NoiseFamily f : kFamilies) {
    const NoiseSchedule s(f, 2.5, 0.21);
    for (std::int64_t k : {1, 8, 999}) {
      EXPECT_DOUBLE_EQ(s.Zeta(k) * s.Scale(k), 2.5);
    }
  }
}

TEST(ScheduleFeasible, HalfIsTheBoundary) {
  EXPECT_TRUE(ScheduleFeasible(0.15));
  EXPECT_TRUE(ScheduleFeasible(0.5));
  EXPECT_FALSE(ScheduleFeasible(0.6));
}

TEST(NoiseSchedule, RejectsBadParameters) {
  EXPECT_THROW(NoiseSchedule(NoiseFamily::kGaussian, 0.0, 0.1),
               ValidationError);
  EXPECT_THROW(NoiseSchedule(NoiseFamily::kGaussian, 1.0, -0.1),
               ValidationError);
  EXPECT_THROW(ParseFamily("uniform"), ValidationError);
  EXPECT_EQ(ParseFamily("cauchy"), NoiseFamily::kCauchy);
}

}  // namespace
}  // namespace privest
