// Copyright 2026 The fsmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace fsmpc {

/// Frequency-response evaluation hit a pole (singular jwI - A or zero
/// denominator on the imaginary axis).
class EvaluationAtPoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transfer function does not have the structure an operation supports
/// (wrong degree, improper where a proper one is required, unstable pole).
class UnsupportedStructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// LQR/Riccati synthesis failed (non-stabilizable pair, indefinite weights).
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Forward integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int node)
      : std::runtime_error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Equality-constraint Jacobian lost row rank at a node.
class ConstraintDegeneracyError : public std::runtime_error {
 public:
  ConstraintDegeneracyError(const std::string& what, int node)
      : std::runtime_error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// A plan (trajectory or input schedule) was queried outside its time span.
class PlanExpiredError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fsmpc
