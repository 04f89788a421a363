// Copyright 2026 The mgfluid Authors
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

#pragma once

#include <cstdint>

namespace mgfluid {

// Counter-based uniform stream. Draw i of stream `seed` is a pure function of
// (seed, i): the seed is scrambled once with the SplitMix64 finalizer, then
// draw i is the finalizer applied to key + (i + 1) * 0x9E3779B97F4A7C15. The
// top 53 bits give a double in [0, 1).
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "splitmix64-counter-v1";

  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0);

  std::uint64_t seed() const { return seed_; }
  // Number of draws taken so far.
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_bits() { return bits_at(counter_++); }
  double next_uniform() { return to_unit(next_bits()); }

  std::uint64_t bits_at(std::uint64_t index) const;
  double uniform_at(std::uint64_t index) const { return to_unit(bits_at(index)); }

  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace mgfluid
