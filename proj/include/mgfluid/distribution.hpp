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

#include <cstddef>
#include <span>
#include <vector>

namespace mgfluid {

// Probability vector over a finite index set. Entries down to -1e-15 are
// clamped to zero on construction; the sum must be 1 within 1e-12.
class Distribution {
 public:
  static constexpr double kNegativeSlack = 1e-15;
  static constexpr double kSumTolerance = 1e-12;

  Distribution() = default;
  // Throws ParameterError when the invariants fail.
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t at);
  // Clamps slightly negative entries and divides by the sum before checking.
  static Distribution normalized(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }

 private:
  std::vector<double> probs_;
};

}  // namespace mgfluid
