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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "privest/errors.h"
#include "privest/experiments.h"
#include "privest/random.h"
#include "test_fixtures.h"

namespace privest {
namespace {

TEST(CompressionVector, CyclesThroughCoordinates) {
  EXPECT_EQ(CompressionVector(2, 1), Eigen::Vector2d(1, 0));
  EXPECT_EQ(CompressionVector(2, 2), Eigen::Vector2d(0, 1));
  EXPECT_EQ(CompressionVector(2, 3), Eigen::Vector2d(1, 0));
  for (std::int64_t k : {1, 2, 99}) {
    EXPECT_EQ(CompressionVector(1, k), Eigen::VectorXd::Ones(1));
  }
  EXPECT_EQ(CompressionVector(3, 6), Eigen::Vector3d(0, 0, 1));
  EXPECT_THROW(CompressionVector(2, 0), DomainError);
}

TEST(Quantize, Examples) {
  EXPECT_EQ(Quantize(0.3, -0.5, 0.0), 1);
  EXPECT_EQ(Quantize(0.3, 0.5, 0.0), -1);
  EXPECT_EQ(Quantize(0.25, 0.5, 0.75), 1);
}

TEST(Quantize, InvariantUnderThresholdShift) {
  RandomStream rng(1);
  for (int t = 0; t < 10000; ++t) {
    // Dyadic values keep x + c and C + c exact.
    const double x = std::ldexp(std::floor(64 * rng.StandardNormal()), -4);
    const double d = std::ldexp(std::floor(64 * rng.StandardNormal()), -4);
    const double c_thr = std::ldexp(std::floor(64 * rng.StandardNormal()), -4);
    const double shift = std::ldexp(std::floor(64 * rng.StandardNormal()), -4);
    EXPECT_EQ(Quantize(x + shift, d, c_thr + shift), Quantize(x, d, c_thr));
  }
}

TEST(StepSizeSchedule, WarmupAndDecay) {
  const StepSizeSchedule s({EdgeStepSize{3.0, 0.8}},
                           {SensorStepSize{3.0, 1.0, 8.0}});
  EXPECT_DOUBLE_EQ(s.Beta(0, 7), 0.0);
  EXPECT_DOUBLE_EQ(s.Beta(0, 8), 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(s.Alpha(0, 32), 3.0 / std::pow(32.0, 0.8));
  EXPECT_EQ(s.FirstActiveTime(0), 8);
  EXPECT_NEAR(DefaultWarmup(3.0, 1.0), std::exp(2.0), 1e-12);
  // The default warmup always satisfies beta_1 < k0^delta.
  for (double b : {0.2, 1.0, 3.0, 17.0}) {
    for (double d : {0.6, 0.8, 1.0}) {
      EXPECT_LT(b, std::pow(DefaultWarmup(b, d), d));
    }
  }
  EXPECT_THROW(StepSizeSchedule({EdgeStepSize{0.0, 0.8}}, {}),
               ValidationError);
}

// Replays one sensor pair through two steps using the raw streams.
TEST(Estimator, MatchesHandTrace) {
  AlgorithmConfig cfg =
      fixtures::TwoSensorConfig(1.0, 0.1, 0.5, 0.8, 0.3, 1.0, 0.0);
  cfg.initial_estimates = {Eigen::VectorXd::Constant(1, 0.4),
                           Eigen::VectorXd::Constant(1, -0.2)};
  const double theta = 0.25;
  Estimator est(cfg, Eigen::VectorXd::Constant(1, theta), 77);

  RunStreams s(77, 0);
  const NoiseSchedule noise(NoiseFamily::kGaussian, 1.0, 0.0);
  double x1 = 0.4, x2 = -0.2;
  for (std::int64_t k = 1; k <= 2; ++k) {
    const double d12 = noise.Sample(k, s.privacy_noise);
    const double d21 = noise.Sample(k, s.privacy_noise);
    const int s12 = x1 + d12 <= 0.0 ? 1 : -1;
    const int s21 = x2 + d21 <= 0.0 ? 1 : -1;
    const double inc = 0.5 / std::pow(static_cast<double>(k), 0.8) * (s12 - s21);
    s.failure.Uniform();
    const double y1 = theta + 0.1 * s.observation_noise.StandardNormal();
    s.failure.Uniform();
    const double y2 = theta + 0.1 * s.observation_noise.StandardNormal();
    const double beta = 0.3 / static_cast<double>(k);
    const double n1 = x1 + beta * (y1 - x1) + inc;
    const double n2 = x2 + beta * (y2 - x2) - inc;
    x1 = n1;
    x2 = n2;

    const StepReport& rep = est.Step();
    EXPECT_DOUBLE_EQ(rep.fusion[0](0), inc);
    EXPECT_DOUBLE_EQ(est.state().estimates[0](0), x1) << "k = " << k;
    EXPECT_DOUBLE_EQ(est.state().estimates[1](0), x2) << "k = " << k;
  }
}

TEST(Estimator, IsolatedNetworkWithoutInnovationStaysPut) {
  AlgorithmConfig cfg;
  cfg.dimension = 2;
  cfg.graph = CommunicationGraph(SwitchingGraphProcess(
      TopologySet(3, {Eigen::MatrixXd::Zero(3, 3)}),
      MarkovChain(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1))));
  cfg.sensors.assign(3, SensorSpec::Reliable(Eigen::MatrixXd::Identity(2, 2), 1.0));
  cfg.steps = StepSizeSchedule({}, std::vector<SensorStepSize>(
                                       3, SensorStepSize{1.0, 1.0, 1e9}));
  cfg.initial_estimates = {Eigen::Vector2d(1, 2), Eigen::Vector2d(-3, 4),
                           Eigen::Vector2d(0.5, 0.5)};
  Estimator est(cfg, Eigen::Vector2d(0, 0), 5);
  for (int t = 0; t < 50; ++t) est.Step();
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(est.state().estimates[i], cfg.initial_estimates[i]);
  }
}

TEST(Estimator, SingleSensorExactInnovation) {
  AlgorithmConfig cfg;
  cfg.sensors = {SensorSpec::Reliable(Eigen::MatrixXd::Ones(1, 1), 0.0)};
  cfg.steps = StepSizeSchedule({}, {SensorStepSize{1.0, 1.0, 1.0}});
  cfg.initial_estimates = {Eigen::VectorXd::Constant(1, -4.0)};
  Estimator est(cfg, Eigen::VectorXd::Constant(1, 2.5), 3);
  est.Step();
  EXPECT_EQ(est.state().estimates[0](0), 2.5);
}

TEST(Estimator, FusionIsConservative) {
  const LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  Estimator est(loaded.algorithm, loaded.theta, 11);
  for (int t = 0; t < 1000; ++t) {
    const StepReport& rep = est.Step();
    Eigen::Vector2d total = Eigen::Vector2d::Zero();
    for (const auto& f : rep.fusion) total += f;
    ASSERT_LT(total.cwiseAbs().maxCoeff(), 1e-12) << "step " << t + 1;
  }
}

TEST(Estimator, NonFiniteEstimateAborts) {
  AlgorithmConfig cfg;
  cfg.sensors = {SensorSpec::Reliable(Eigen::MatrixXd::Ones(1, 1), 0.0)};
  cfg.steps = StepSizeSchedule({}, {SensorStepSize{1.0, 1.0, 1.0}});
  Estimator est(cfg, Eigen::VectorXd::Constant(1, 1e308 * 10.0), 3);
  try {
    est.Step();
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("sensor 1, time 1"), std::string::npos);
  }
}

TEST(Run, OneBitPerLiveNeighbour) {
  const LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  const RunResult r = privest::Run(loaded.algorithm, loaded.theta, 2000, 21);
  EXPECT_EQ(r.total_bits, 2 * r.live_edge_steps);
  EXPECT_GT(r.live_edge_steps, 0);
  EXPECT_EQ(r.bits.cast<std::int64_t>().sum(), r.total_bits);
}

TEST(Run, MultiBitSendsOneBitPerCoordinate) {
  LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  loaded.algorithm.use_compression = false;
  const RunResult r = privest::Run(loaded.algorithm, loaded.theta, 2000, 21);
  EXPECT_EQ(r.total_bits, 2 * 2 * r.live_edge_steps);
}

TEST(Run, SameSeedIsBitIdentical) {
  const LoadedConfig loaded = fixtures::Load("network8_laplace.yaml");
  const RunResult a = privest::Run(loaded.algorithm, loaded.theta, 3000, 99, 4);
  const RunResult b = privest::Run(loaded.algorithm, loaded.theta, 3000, 99, 4);
  EXPECT_TRUE((a.sq_error.array() == b.sq_error.array()).all());
  const RunResult c = privest::Run(loaded.algorithm, loaded.theta, 3000, 99, 5);
  EXPECT_FALSE((a.sq_error.array() == c.sq_error.array()).all());
}

TEST(Run, ZeroObservationNoiseCompleteGraphContracts) {
  const int n_sensors = 4;
  Eigen::MatrixXd complete = Eigen::MatrixXd::Ones(n_sensors, n_sensors);
  complete.diagonal().setZero();
  AlgorithmConfig cfg;
  cfg.dimension = 1;
  cfg.graph = CommunicationGraph(SwitchingGraphProcess(
      TopologySet(n_sensors, {complete}),
      MarkovChain(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1))));
  cfg.sensors.assign(n_sensors,
                     SensorSpec::Reliable(Eigen::MatrixXd::Ones(1, 1), 0.0));
  const int m = cfg.edge_count();
  cfg.thresholds.assign(m, 0.0);
  cfg.noise.assign(m, NoiseSchedule(NoiseFamily::kGaussian, 1.0, 0.1));
  cfg.steps = StepSizeSchedule(
      std::vector<EdgeStepSize>(m, EdgeStepSize{0.1, 0.8}),
      std::vector<SensorStepSize>(n_sensors, SensorStepSize{0.5, 1.0, 1.0}));
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 1.0);
  const RunResult r = privest::Run(cfg, theta, 20000, 8);
  for (int i = 0; i < n_sensors; ++i) {
    // Initial error is |0 - 1| = 1.
    EXPECT_LT(std::abs(r.final_state.estimates[i](0) - 1.0), 0.1)
        << "sensor " << i + 1;
  }
}

TEST(Run, MeanSquaredErrorFallsBetweenHundredAndTenThousand) {
  const LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  MonteCarloOptions opt;
  opt.repeats = 100;
  opt.horizon = 10000;
  opt.seed = 31;
  const MonteCarloResult mc = MonteCarlo(loaded.algorithm, loaded.theta, opt);
  const double diff = mc.mean_sq_error[99] - mc.mean_sq_error[9999];
  const double se = std::hypot(mc.std_error[99], mc.std_error[9999]);
  EXPECT_GT(diff, 3.0 * se);
}

TEST(ValidateAssumptions, ShippedConfigPasses) {
  const LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  const AssumptionReport rep = ValidateAssumptions(loaded.algorithm);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  EXPECT_TRUE(rep.all_passed());
}

TEST(ValidateAssumptions, SmallGammaBreaksSquareSummability) {
  LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  for (auto& e : loaded.algorithm.steps.mutable_edges()) e.gamma = 0.4;
  const AssumptionReport rep = ValidateAssumptions(loaded.algorithm);
  ASSERT_NE(rep.Find("Σα² < ∞"), nullptr);
  EXPECT_FALSE(rep.Find("Σα² < ∞")->passed);
  EXPECT_FALSE(rep.all_passed());
}

TEST(ValidateAssumptions, FastNoiseGrowthBreaksDivergence) {
  LoadedConfig loaded = fixtures::Load("network8_gaussian.yaml");
  for (auto& n : loaded.algorithm.noise) {
    n = NoiseSchedule(n.family(), n.base_scale(), 0.3);
  }
  const AssumptionReport rep = ValidateAssumptions(loaded.algorithm);
  ASSERT_NE(rep.Find("Σz_k = ∞"), nullptr);
  EXPECT_FALSE(rep.Find("Σz_k = ∞")->passed);
  EXPECT_NE(rep.Find("Σz_k = ∞")->detail.find("> 1"), std::string::npos);
}

}  // namespace
}  // namespace privest
