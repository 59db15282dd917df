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

namespace fsmpc {

struct LqrSolution {
  Eigen::MatrixXd P;  // stabilizing solution of the algebraic Riccati equation
  Eigen::MatrixXd K;  // u = -K x
  double residual = 0.0;  // max-abs entry of A'P + PA - P B R^-1 B' P + Q
};

/// Continuous-time infinite-horizon LQR via the Hamiltonian eigenvector
/// method. Requires (A, B) stabilizable, Q >= 0 symmetric, R > 0 symmetric;
/// throws SynthesisError otherwise or when no stabilizing solution exists.
LqrSolution lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

}  // namespace fsmpc
