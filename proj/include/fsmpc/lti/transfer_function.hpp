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

#include <complex>

#include <Eigen/Core>

namespace fsmpc {

/// SISO rational transfer function in the Laplace variable s = jw.
/// Coefficients are stored in ascending powers, so num = (1, 0.1) means
/// 1 + 0.1 s. The denominator must have nonzero constant and leading
/// coefficients.
struct RationalTransferFunction {
  Eigen::VectorXd num;
  Eigen::VectorXd den;

  RationalTransferFunction() = default;
  RationalTransferFunction(Eigen::VectorXd numerator, Eigen::VectorXd denominator);

  /// The constant function 1/1.
  static RationalTransferFunction identity();

  int numerator_degree() const { return static_cast<int>(num.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(den.size()) - 1; }

  /// degree(num) <= degree(den).
  bool is_proper() const { return numerator_degree() <= denominator_degree(); }
  /// Equal degrees: finite nonzero gain as w -> infinity.
  bool is_biproper() const { return numerator_degree() == denominator_degree(); }
};

/// Evaluates tf at s = jw. Throws EvaluationAtPoleError if the denominator
/// vanishes at that frequency.
std::complex<double> tf_eval(const RationalTransferFunction& tf, double omega);

}  // namespace fsmpc
