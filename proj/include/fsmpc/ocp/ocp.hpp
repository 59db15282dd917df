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

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace fsmpc {

using DynamicsFn = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t)>;
using DynamicsJacobianFn =
    std::function<void(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                       Eigen::MatrixXd& dfdx, Eigen::MatrixXd& dfdu)>;
using StateCostFn = std::function<double(const Eigen::VectorXd& x, double t)>;
using StateCostExpansionFn = std::function<void(
    const Eigen::VectorXd& x, double t, Eigen::VectorXd& grad, Eigen::MatrixXd& hess)>;
using InputCostFn = std::function<double(const Eigen::VectorXd& u, double t)>;
using InputCostExpansionFn = std::function<void(
    const Eigen::VectorXd& u, double t, Eigen::VectorXd& grad, Eigen::MatrixXd& hess)>;
using TerminalCostFn = std::function<double(const Eigen::VectorXd& x)>;
using TerminalCostExpansionFn = std::function<void(
    const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess)>;
using ConstraintFn = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t)>;
using ConstraintJacobianFn =
    std::function<void(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                       Eigen::MatrixXd& dgdx, Eigen::MatrixXd& dgdu)>;
using InputProjectionFn = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t)>;
using InitialInputFn = std::function<Eigen::VectorXd(double t)>;

/// Continuous-time optimal control problem on a fixed horizon, solved on a
/// uniform grid of `nodes` intervals. Running cost is separable,
/// L(x, u, t) = state_cost(x, t) + input_cost(u, t). Analytic derivative
/// callbacks are optional; absent ones are replaced by central finite
/// differences inside the solver.
struct OcpDefinition {
  int state_dim = 0;
  int input_dim = 0;
  double start_time = 0.0;
  double horizon = 1.0;
  int nodes = 100;

  DynamicsFn dynamics;
  DynamicsJacobianFn dynamics_jacobian;

  StateCostFn state_cost;
  StateCostExpansionFn state_cost_expansion;
  InputCostFn input_cost;
  InputCostExpansionFn input_cost_expansion;
  TerminalCostFn terminal_cost;
  TerminalCostExpansionFn terminal_cost_expansion;

  /// g_eq(x, u, t) = 0 rows; at most input_dim rows per time.
  ConstraintFn equality_constraints;
  ConstraintJacobianFn equality_constraint_jacobian;

  /// Feasibility projection applied to the input in every forward rollout
  /// (friction-cone clamp).
  InputProjectionFn input_projection;

  /// Warm-start feedforward for cold solves; zeros when absent.
  InitialInputFn initial_input;

  double dt() const { return horizon / nodes; }
  double end_time() const { return start_time + horizon; }
  double node_time(int k) const { return start_time + k * dt(); }

  /// Throws std::invalid_argument on missing callbacks or bad dimensions.
  void validate() const;
};

/// States and zero-order-hold inputs on the uniform node grid.
struct Trajectory {
  Eigen::VectorXd times;                // N + 1
  std::vector<Eigen::VectorXd> states;  // N + 1
  std::vector<Eigen::VectorXd> inputs;  // N

  int nodes() const { return static_cast<int>(inputs.size()); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  double start_time() const { return times[0]; }
  double end_time() const { return times[times.size() - 1]; }
  bool covers(double t) const { return t >= start_time() - 1e-9 && t <= end_time() + 1e-9; }

  /// Linear interpolation between nodes, clamped at the ends.
  Eigen::VectorXd state_at(double t) const;
  /// Zero-order hold, clamped at the ends.
  const Eigen::VectorXd& input_at(double t) const;
};

/// Time-varying affine policy u_k = feedforward_k + K_k (x - nominal_k).
struct FeedbackPolicy {
  Eigen::VectorXd times;                         // N + 1
  std::vector<Eigen::VectorXd> nominal_states;   // N + 1
  std::vector<Eigen::VectorXd> feedforward;      // N
  std::vector<Eigen::MatrixXd> gains;            // N, m x n

  int nodes() const { return static_cast<int>(feedforward.size()); }

  static FeedbackPolicy open_loop(const Eigen::VectorXd& times,
                                  std::vector<Eigen::VectorXd> inputs,
                                  int state_dim);

  Eigen::VectorXd evaluate(int node, const Eigen::VectorXd& x) const;
};

struct SolverSettings {
  int max_iterations = 50;
  double cost_decrease_tolerance = 1e-6;  // relative, scaled by 1 + |cost|
  double line_search_factor = 0.5;
  int line_search_steps = 10;  // smallest step = factor^steps
  double finite_difference_step = 1e-6;
  double regularization_initial = 1e-6;
  double regularization_floor = 1e-6;
  double merit_constraint_penalty = 1e3;

  void validate() const;
};

}  // namespace fsmpc
