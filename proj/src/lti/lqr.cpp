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

#include "fsmpc/lti/lqr.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {

LqrSolution lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m) {
    throw SynthesisError("lqr_gain: inconsistent dimensions");
  }

  Eigen::LLT<Eigen::MatrixXd> r_chol(R);
  if (r_chol.info() != Eigen::Success) {
    throw SynthesisError("lqr_gain: R is not positive definite");
  }
  const Eigen::MatrixXd R_inv_Bt = r_chol.solve(B.transpose());

  // Hamiltonian [A, -B R^-1 B'; -Q, -A']; the stable invariant subspace
  // yields the stabilizing Riccati solution P = X2 X1^-1.
  Eigen::MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A;
  H.topRightCorner(n, n) = -B * R_inv_Bt;
  H.bottomLeftCorner(n, n) = -Q;
  H.bottomRightCorner(n, n) = -A.transpose();

  Eigen::EigenSolver<Eigen::MatrixXd> eigen_solver(H);
  if (eigen_solver.info() != Eigen::Success) {
    throw SynthesisError("lqr_gain: Hamiltonian eigen decomposition failed");
  }

  Eigen::MatrixXcd stable_basis(2 * n, n);
  int count = 0;
  for (int i = 0; i < 2 * n; ++i) {
    if (eigen_solver.eigenvalues()[i].real() < 0.0) {
      if (count == n) {
        ++count;
        break;
      }
      stable_basis.col(count++) = eigen_solver.eigenvectors().col(i);
    }
  }
  if (count != n) {
    throw SynthesisError(
        "lqr_gain: Hamiltonian does not have an n-dimensional stable subspace "
        "(pair not stabilizable or Q not detectable)");
  }

  const Eigen::MatrixXcd X1 = stable_basis.topRows(n);
  const Eigen::MatrixXcd X2 = stable_basis.bottomRows(n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(X1);
  if (!lu.isInvertible()) {
    throw SynthesisError("lqr_gain: stable subspace basis is degenerate");
  }

  LqrSolution solution;
  Eigen::MatrixXd P = (X2 * lu.inverse()).real();
  solution.P = 0.5 * (P + P.transpose());
  solution.K = r_chol.solve(B.transpose() * solution.P);

  const Eigen::MatrixXd riccati_residual =
      A.transpose() * solution.P + solution.P * A -
      solution.P * B * r_chol.solve(B.transpose() * solution.P) + Q;
  solution.residual = riccati_residual.cwiseAbs().maxCoeff();
  if (solution.residual > 1e-8 * (1.0 + solution.P.norm())) {
    throw SynthesisError("lqr_gain: Riccati residual too large");
  }

  // The stabilizing solution must render A - B K Hurwitz.
  Eigen::EigenSolver<Eigen::MatrixXd> closed_loop(A - B * solution.K);
  if (closed_loop.eigenvalues().real().maxCoeff() >= 0.0) {
    throw SynthesisError("lqr_gain: closed loop not Hurwitz");
  }
  return solution;
}

}  // namespace fsmpc
