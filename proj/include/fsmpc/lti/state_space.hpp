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

#include <Eigen/Core>
#include <complex>

#include "fsmpc/lti/transfer_function.hpp"

namespace fsmpc {

/// Continuous-time state-space system (A, B, C, D). The state dimension may
/// be zero, in which case the system is the static gain D.
struct StateSpaceRealization {
  Eigen::MatrixXd A;  // n x n
  Eigen::MatrixXd B;  // n x m
  Eigen::MatrixXd C;  // p x n
  Eigen::MatrixXd D;  // p x m

  StateSpaceRealization() = default;
  StateSpaceRealization(Eigen::MatrixXd A_in, Eigen::MatrixXd B_in,
                        Eigen::MatrixXd C_in, Eigen::MatrixXd D_in);

  static StateSpaceRealization static_gain(Eigen::MatrixXd gain);

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(D.cols()); }
  int output_dim() const { return static_cast<int>(D.rows()); }
};

/// Frequency response C (jwI - A)^-1 B + D. Throws EvaluationAtPoleError when
/// jw is an eigenvalue of A.
Eigen::MatrixXcd ss_freq_response(const StateSpaceRealization& ss, double omega);

/// Closed-form balanced realization of a first-order transfer function
/// (c0 + c1 s)/(d0 + d1 s) with d0, d1 > 0. The result has a single state
/// with |B| = |C| (sign split when the residue is negative), or no state at
/// all when the function is constant or the pole and zero cancel. A constant
/// function num/den of degree zero yields the static gain.
StateSpaceRealization balanced_first_order(const RationalTransferFunction& tf);

}  // namespace fsmpc
