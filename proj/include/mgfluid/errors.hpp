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

#include <stdexcept>
#include <string>

namespace mgfluid {

// Tensor shapes disagree with the declared state/action counts.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A hyperparameter or argument lies outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A Markov kernel has no unique invariant law (or it could not be found).
class ErgodicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Drift evaluation failed at an integration node.
class DriftEvaluationError : public std::runtime_error {
 public:
  DriftEvaluationError(long node, const std::string& what)
      : std::runtime_error("drift evaluation failed at node " + std::to_string(node) + ": " + what),
        node_(node) {}
  long node() const { return node_; }

 private:
  long node_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mgfluid
