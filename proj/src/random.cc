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

#include "privest/random.h"

namespace privest {

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t run,
                         StreamPurpose purpose) {
  std::uint64_t h = MixSeed(root);
  h = MixSeed(h ^ run);
  return MixSeed(h ^ static_cast<std::uint64_t>(purpose));
}

RunStreams::RunStreams(std::uint64_t root_seed, std::uint64_t run_index)
    : graph(DeriveSeed(root_seed, run_index, StreamPurpose::kGraph)),
      privacy_noise(
          DeriveSeed(root_seed, run_index, StreamPurpose::kPrivacyNoise)),
      observation_noise(
          DeriveSeed(root_seed, run_index, StreamPurpose::kObservationNoise)),
      failure(DeriveSeed(root_seed, run_index, StreamPurpose::kFailure)) {}

}  // namespace privest
