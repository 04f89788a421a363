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

#include "mgfluid/distribution.hpp"

#include <cmath>
#include <string>

#include "mgfluid/errors.hpp"

namespace mgfluid {

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ParameterError("a distribution needs at least one atom");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    double& p = probs_[i];
    if (!std::isfinite(p)) throw ParameterError("non-finite probability at " + std::to_string(i));
    if (p < 0.0) {
      if (p < -kNegativeSlack) {
        throw ParameterError("negative probability " + std::to_string(p) + " at " +
                             std::to_string(i));
      }
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ParameterError("probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t at) {
  std::vector<double> p(n, 0.0);
  p.at(at) = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double& w : weights) {
    if (w < 0.0 && w >= -kNegativeSlack) w = 0.0;
    sum += w;
  }
  if (!(sum > 0.0)) throw ParameterError("cannot normalize weights with non-positive sum");
  for (double& w : weights) w /= sum;
  return Distribution(std::move(weights));
}

}  // namespace mgfluid
