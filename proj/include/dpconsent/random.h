// Copyright 2026 The DP Consent Pipeline Authors
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

#ifndef DPCONSENT_RANDOM_H_
#define DPCONSENT_RANDOM_H_

#include <cstdint>
#include <optional>
#include <random>

namespace dpconsent {

// Seedable generator. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the mappings to doubles and indices below are
// done by hand so that seeded streams are reproducible across standard
// library implementations (and by the browser client).
class Rng {
 public:
  // Seeds from 64 bits of std::random_device output.
  Rng();
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  // nullopt -> OS entropy.
  static Rng FromOptionalSeed(std::optional<uint64_t> seed) {
    return seed.has_value() ? Rng(*seed) : Rng();
  }

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double UniformOpen01() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be positive. Unbiased (rejection).
  uint64_t UniformIndex(uint64_t n);

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

// Fresh 53-bit seed from OS entropy. Recorded seeds stay below 2^53 so
// they survive a round trip through JavaScript numbers.
uint64_t EntropySeed();

}  // namespace dpconsent

#endif  // DPCONSENT_RANDOM_H_
