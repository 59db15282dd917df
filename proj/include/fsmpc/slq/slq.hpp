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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fsmpc/ocp/ocp.hpp"

namespace fsmpc {

/// LQ approximation about a trajectory. Dynamics Jacobians and cost
/// expansions are continuous-time quantities at the nodes; the backward pass
/// performs the discretization.
struct LqApproximation {
  std::vector<Eigen::MatrixXd> dfdx;  // N
  std::vector<Eigen::MatrixXd> dfdu;  // N
  std::vector<Eigen::VectorXd> state_grad;  // N + 1 (rate of running state cost)
  std::vector<Eigen::MatrixXd> state_hess;  // N + 1
  std::vector<Eigen::VectorXd> input_grad;  // N
  std::vector<Eigen::MatrixXd> input_hess;  // N
  std::vector<Eigen::MatrixXd> dgdx;        // N (rows_k x n)
  std::vector<Eigen::MatrixXd> dgdu;        // N (rows_k x m)
  std::vector<Eigen::VectorXd> residual;    // N (constraint value at nominal)
  Eigen::VectorXd terminal_grad;
  Eigen::MatrixXd terminal_hess;
};

struct BackwardPassResult {
  std::vector<Eigen::VectorXd> feedforward_delta;  // update direction per node
  std::vector<Eigen::MatrixXd> gains;              // K_k
  double expected_decrease_linear = 0.0;     // sum k' Q_u  (negative on descent)
  double expected_decrease_quadratic = 0.0;  // 0.5 sum k' Q_uu k
  double regularization_used = 0.0;
};

struct LineSearchResult {
  Trajectory trajectory;
  double step_size = 0.0;  // 0 when no candidate was accepted
  double cost = 0.0;
  double merit = 0.0;
};

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double merit = 0.0;
  double step_size = 0.0;
  double constraint_violation = 0.0;  // infinity norm over nodes and rows
  double regularization = 0.0;
};

struct SolveResult {
  Trajectory trajectory;
  FeedbackPolicy policy;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  double cost = 0.0;
  double merit = 0.0;
  double constraint_violation = 0.0;
};

/// Integrates the dynamics forward with RK4 and zero-order-hold inputs,
/// applying the policy and then the input-projection hook at every node.
/// Throws DivergenceError (with the node index) on non-finite states.
Trajectory rollout(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                   const FeedbackPolicy& policy);

/// Jacobians of dynamics and constraints plus quadratic cost expansions about
/// the trajectory; analytic callbacks where provided, central finite
/// differences otherwise.
LqApproximation linearize(const OcpDefinition& ocp, const Trajectory& trajectory,
                          double fd_step = 1e-6);

/// Discrete Riccati sweep over the LQ approximation with equality-constraint
/// projection at the nodes. `regularization` is added to the input Hessian;
/// it is raised internally (reported in the result) if the projected Hessian
/// is not positive definite. Throws ConstraintDegeneracyError when a
/// constraint Jacobian loses row rank.
BackwardPassResult backward_pass(const OcpDefinition& ocp,
                                 const LqApproximation& lq,
                                 double regularization);

/// Backtracking line search on the feedforward update. Accepts the first
/// candidate whose merit (cost + penalty * constraint 1-norm) decreases;
/// returns step size 0 and the unchanged trajectory when none does.
LineSearchResult line_search(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                             const Trajectory& current,
                             const BackwardPassResult& direction,
                             const SolverSettings& settings);

/// Full SLQ solve: iterates rollout / linearize / backward pass / line search
/// until the accepted cost decrease falls below tolerance.
SolveResult solve(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                  const SolverSettings& settings,
                  const FeedbackPolicy* warm_start = nullptr);

/// One real-time iteration from the previous solution shifted onto the new
/// horizon (terminal node held).
SolveResult mpc_step(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                     const SolveResult& previous, const SolverSettings& settings);

/// Time-shift helper used by mpc_step; exposed for tests.
FeedbackPolicy shift_policy(const FeedbackPolicy& policy,
                            const Eigen::VectorXd& new_times);

/// Discrete objective used by the solver: trapezoidal quadrature of the state
/// cost, exact zero-order-hold quadrature of the input cost, plus terminal
/// cost.
double trajectory_cost(const OcpDefinition& ocp, const Trajectory& trajectory);

/// Sum of constraint 1-norms (for the merit function) and the infinity norm.
struct ConstraintViolation {
  double one_norm = 0.0;
  double inf_norm = 0.0;
};
ConstraintViolation constraint_violation(const OcpDefinition& ocp,
                                         const Trajectory& trajectory);

/// CSV dump of an iteration log: iteration, cost, merit, step size,
/// constraint violation.
std::string iteration_log_csv(const std::vector<IterationRecord>& records);

}  // namespace fsmpc
