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

#include "fsmpc/lti/transfer_function.hpp"

#include <cmath>
#include <stdexcept>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {
namespace {

// Trims trailing (highest-order) zero coefficients, keeping at least one.
Eigen::VectorXd trim(Eigen::VectorXd coeffs) {
  int size = static_cast<int>(coeffs.size());
  while (size > 1 && coeffs[size - 1] == 0.0) {
    --size;
  }
  return coeffs.head(size).eval();
}

std::complex<double> polyval_jw(const Eigen::VectorXd& coeffs, double omega) {
  // Horner in s = jw.
  const std::complex<double> s(0.0, omega);
  std::complex<double> value(0.0, 0.0);
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    value = value * s + coeffs[k];
  }
  return value;
}

}  // namespace

RationalTransferFunction::RationalTransferFunction(Eigen::VectorXd numerator,
                                                   Eigen::VectorXd denominator)
    : num(trim(std::move(numerator))), den(trim(std::move(denominator))) {
  if (num.size() == 0 || den.size() == 0) {
    throw std::invalid_argument("transfer function: empty coefficient vector");
  }
  if (den[0] == 0.0 || den[den.size() - 1] == 0.0) {
    throw std::invalid_argument(
        "transfer function: denominator needs nonzero constant and leading "
        "coefficients");
  }
}

RationalTransferFunction RationalTransferFunction::identity() {
  Eigen::VectorXd one(1);
  one << 1.0;
  return RationalTransferFunction(one, one);
}

std::complex<double> tf_eval(const RationalTransferFunction& tf, double omega) {
  const std::complex<double> den_value = polyval_jw(tf.den, omega);
  // Scale-aware pole detection: compare against the magnitude the denominator
  // coefficients could produce at this frequency.
  double scale = 0.0;
  double wk = 1.0;
  for (int k = 0; k < tf.den.size(); ++k) {
    scale += std::abs(tf.den[k]) * wk;
    wk *= std::max(omega, 1.0);
  }
  if (std::abs(den_value) <= 1e-14 * scale) {
    throw EvaluationAtPoleError("tf_eval: denominator vanishes at omega=" +
                                std::to_string(omega));
  }
  return polyval_jw(tf.num, omega) / den_value;
}

}  // namespace fsmpc
