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

#ifndef PRIVEST_RANDOM_H_
#define PRIVEST_RANDOM_H_

#include <cstdint>
#include <random>

namespace privest {

// Independent randomness sources inside one simulation run. Each purpose gets
// its own engine so that toggling one source leaves the others untouched.
enum class StreamPurpose : std::uint64_t {
  kGraph = 1,
  kPrivacyNoise = 2,
  kObservationNoise = 3,
  kFailure = 4,
  kAuxiliary = 5,
};

// SplitMix64 finalizer; used to derive substream seeds from a root seed.
std::uint64_t MixSeed(std::uint64_t x);

// Seed of the substream (root, run, purpose). Distinct tuples give
// statistically independent engines.
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t run,
                         StreamPurpose purpose);

// A single random stream: a 64-bit Mersenne twister plus a cached standard
// normal generator.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform draw on the open interval (0, 1) with 53 bits of resolution.
  double Uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double StandardNormal() { return normal_(engine_); }
  bool Bernoulli(double p) { return Uniform() < p; }

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// The four purpose streams of one run.
struct RunStreams {
  RunStreams(std::uint64_t root_seed, std::uint64_t run_index);

  RandomStream graph;
  RandomStream privacy_noise;
  RandomStream observation_noise;
  RandomStream failure;
};

}  // namespace privest

#endif  // PRIVEST_RANDOM_H_
