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

#include "fsmpc/lti/state_space.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {

StateSpaceRealization::StateSpaceRealization(Eigen::MatrixXd A_in,
                                             Eigen::MatrixXd B_in,
                                             Eigen::MatrixXd C_in,
                                             Eigen::MatrixXd D_in)
    : A(std::move(A_in)), B(std::move(B_in)), C(std::move(C_in)), D(std::move(D_in)) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() ||
      D.cols() != B.cols()) {
    throw std::invalid_argument("state space: inconsistent dimensions");
  }
}

StateSpaceRealization StateSpaceRealization::static_gain(Eigen::MatrixXd gain) {
  const auto p = gain.rows();
  const auto m = gain.cols();
  return StateSpaceRealization(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, m),
                               Eigen::MatrixXd(p, 0), std::move(gain));
}

Eigen::MatrixXcd ss_freq_response(const StateSpaceRealization& ss, double omega) {
  if (ss.state_dim() == 0) {
    return ss.D.cast<std::complex<double>>();
  }
  const int n = ss.state_dim();
  Eigen::MatrixXcd resolvent_arg =
      std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) -
      ss.A.cast<std::complex<double>>();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(resolvent_arg);
  if (!lu.isInvertible()) {
    throw EvaluationAtPoleError("ss_freq_response: jw is an eigenvalue of A");
  }
  return ss.C.cast<std::complex<double>>() *
             lu.solve(ss.B.cast<std::complex<double>>()) +
         ss.D.cast<std::complex<double>>();
}

StateSpaceRealization balanced_first_order(const RationalTransferFunction& tf) {
  if (!tf.is_proper()) {
    throw UnsupportedStructureError(
        "balanced_first_order: improper transfer function");
  }
  if (tf.denominator_degree() > 1) {
    throw UnsupportedStructureError(
        "balanced_first_order: degree above one is not supported");
  }
  if (tf.denominator_degree() == 0) {
    // Constant gain num0/den0; no dynamics.
    Eigen::MatrixXd gain(1, 1);
    gain << tf.num[0] / tf.den[0];
    return StateSpaceRealization::static_gain(gain);
  }

  const double c0 = tf.num[0];
  const double c1 = tf.numerator_degree() >= 1 ? tf.num[1] : 0.0;
  const double d0 = tf.den[0];
  const double d1 = tf.den[1];
  if (d0 <= 0.0 || d1 <= 0.0) {
    throw UnsupportedStructureError(
        "balanced_first_order: denominator must be positive (stable pole)");
  }

  const double pole = -d0 / d1;
  const double direct = c1 / d1;
  // Residue of (c0 + c1 s)/(d0 + d1 s) at its pole.
  const double residue = (c0 * d1 - c1 * d0) / (d1 * d1);
  if (residue == 0.0) {
    // Pole/zero cancellation; the minimal realization is the direct term.
    Eigen::MatrixXd gain(1, 1);
    gain << c0 / d0;
    return StateSpaceRealization::static_gain(gain);
  }

  // One-state balanced form: both Gramians equal |residue|/(-2 pole).
  const double gain = std::sqrt(std::abs(residue));
  Eigen::MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << pole;
  B << gain;
  C << (residue > 0.0 ? gain : -gain);
  D << direct;
  return StateSpaceRealization(A, B, C, D);
}

}  // namespace fsmpc
