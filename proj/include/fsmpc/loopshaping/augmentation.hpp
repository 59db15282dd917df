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

#include "fsmpc/loopshaping/filter_bank.hpp"
#include "fsmpc/ocp/ocp.hpp"

namespace fsmpc {

/// An optimal control problem rewritten over the augmented state [x; x_s] and
/// the auxiliary input nu. The inverse-filter bank substitutes
/// u = C_s x_s + D_s nu into the original dynamics and constraints, the
/// filter dynamics x_s_dot = A_s x_s + B_s nu are appended, and the input
/// cost is evaluated on nu. Evaluating the augmented problem at (x, x_s, nu)
/// therefore equals evaluating the original at (x, u = C_s x_s + D_s nu).
struct AugmentedOcp {
  OcpDefinition problem;  // ready to hand to the solver
  FilterBank bank;
  int original_state_dim = 0;
  int original_input_dim = 0;

  int augmented_state_dim() const { return problem.state_dim; }
  int filter_state_dim() const { return bank.state_dim(); }

  Eigen::VectorXd lift_state(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& x_s) const;
  Eigen::VectorXd original_state(const Eigen::VectorXd& z) const;
  Eigen::VectorXd filter_state(const Eigen::VectorXd& z) const;

  /// u = C_s x_s + D_s nu for an augmented state/input pair.
  Eigen::VectorXd recovered_input(const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& nu) const;

  /// Filter state whose output equals u when nu = u is held (DC condition);
  /// used to initialize cold starts.
  Eigen::VectorXd steady_filter_state(const Eigen::VectorXd& u) const;
};

/// Frequency-shaped augmentation with the inverse-filter (improper r)
/// formulation. Identity specs yield a zero-dimensional filter state and an
/// unchanged problem.
AugmentedOcp augment_ocp(const OcpDefinition& ocp, const ShapingSpec& spec);

/// The derivative special case r(w) = jw: x_s_dot = nu with u = x_s, so the
/// auxiliary input is the derivative of the original input. Original
/// state-input constraints become pure-state constraints and are enforced by
/// a quadratic penalty folded into the state cost.
AugmentedOcp derivative_augmentation(const OcpDefinition& ocp,
                                     double constraint_penalty = 1e6);

}  // namespace fsmpc
