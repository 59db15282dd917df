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

#include <vector>

#include <Eigen/Core>

#include "fsmpc/lti/state_space.hpp"
#include "fsmpc/lti/transfer_function.hpp"
#include "fsmpc/loopshaping/shaping_spec.hpp"

namespace fsmpc {

/// Block-diagonal realization of the inverse shaping functions
/// s_i(w) = 1/r_i(w) = (1 + alpha_i jw)/(1 + beta_i jw), one balanced
/// first-order block per shaped input. Unshaped inputs contribute no state
/// and a unit direct term:
///
///   x_s_dot = A_s x_s + B_s nu,      u = C_s x_s + D_s nu.
struct FilterBank {
  Eigen::MatrixXd A_s;  // n_s x n_s, diagonal with entries -1/beta_i
  Eigen::MatrixXd B_s;  // n_s x m
  Eigen::MatrixXd C_s;  // m x n_s
  Eigen::MatrixXd D_s;  // m x m, diagonal with entries alpha_i/beta_i (1 unshaped)
  std::vector<int> state_to_input;  // filter state j belongs to input state_to_input[j]

  int state_dim() const { return static_cast<int>(A_s.rows()); }
  int input_dim() const { return static_cast<int>(D_s.rows()); }
  bool is_identity() const { return state_dim() == 0; }
};

/// Shaping function r_i(w) = (1 + beta_i jw)/(1 + alpha_i jw) of input i;
/// the identity 1/1 for unshaped inputs.
RationalTransferFunction make_r_filter(const ShapingSpec& spec, int input_index);

/// Builds the block-diagonal inverse-filter bank for a spec.
FilterBank make_filter_bank(const ShapingSpec& spec);

/// u = C_s x_s + D_s nu.
Eigen::VectorXd recover_input(const FilterBank& bank, const Eigen::VectorXd& x_s,
                              const Eigen::VectorXd& nu);

/// Piecewise-constant auxiliary-input plan used for filter-state propagation.
struct AuxiliaryInputPlan {
  Eigen::VectorXd times;               // node times, strictly increasing
  std::vector<Eigen::VectorXd> values;  // nu held constant on [t_k, t_k+1)

  /// Zero-order-hold sample; holds the last value at and beyond the final
  /// node. Throws PlanExpiredError when t precedes the plan.
  const Eigen::VectorXd& sample(double t) const;
};

/// Integrates x_s_dot = A_s x_s + B_s nu from t0 over dt > 0 under the
/// zero-order-hold plan, using the exact exponential of the diagonal A_s on
/// each hold interval. Throws PlanExpiredError if the plan does not cover
/// [t0, t0 + dt].
Eigen::VectorXd propagate_filter_state(const FilterBank& bank,
                                       const Eigen::VectorXd& x_s,
                                       const AuxiliaryInputPlan& plan, double t0,
                                       double dt);

}  // namespace fsmpc
