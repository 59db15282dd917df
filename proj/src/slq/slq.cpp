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

#include "fsmpc/slq/slq.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {
namespace {

constexpr double kRegularizationCeiling = 1e10;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

Eigen::VectorXd rk4_step(const OcpDefinition& ocp, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u, double t, double h) {
  const Eigen::VectorXd k1 = ocp.dynamics(x, u, t);
  const Eigen::VectorXd k2 = ocp.dynamics(x + 0.5 * h * k1, u, t + 0.5 * h);
  const Eigen::VectorXd k3 = ocp.dynamics(x + 0.5 * h * k2, u, t + 0.5 * h);
  const Eigen::VectorXd k4 = ocp.dynamics(x + h * k3, u, t + h);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Discrete transition matching the RK4 step of the frozen linear system:
// A_d = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24,
// B_d = h (I + hA/2 + (hA)^2/6 + (hA)^3/24) B.
void discretize_transition(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           double h, Eigen::MatrixXd& A_d, Eigen::MatrixXd& B_d) {
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd hA = h * A;
  const Eigen::MatrixXd hA2 = hA * hA;
  const Eigen::MatrixXd hA3 = hA2 * hA;
  A_d = Eigen::MatrixXd::Identity(n, n) + hA + 0.5 * hA2 + hA3 / 6.0 +
        hA3 * hA / 24.0;
  B_d = h * (Eigen::MatrixXd::Identity(n, n) + 0.5 * hA + hA2 / 6.0 + hA3 / 24.0) *
        B;
}

// Trapezoidal weight of the running state cost at node k.
double state_weight(const OcpDefinition& ocp, int k) {
  const double h = ocp.dt();
  return (k == 0 || k == ocp.nodes) ? 0.5 * h : h;
}

Eigen::VectorXd fd_scale_steps(const Eigen::VectorXd& v, double step) {
  return step * (v.cwiseAbs().array() + 1.0).matrix();
}

}  // namespace

Trajectory rollout(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                   const FeedbackPolicy& policy) {
  ocp.validate();
  if (x0.size() != ocp.state_dim) {
    throw std::invalid_argument("rollout: initial state dimension mismatch");
  }
  if (policy.nodes() < ocp.nodes) {
    throw std::invalid_argument("rollout: policy does not cover all nodes");
  }

  const int N = ocp.nodes;
  const double h = ocp.dt();

  Trajectory trajectory;
  trajectory.times.resize(N + 1);
  trajectory.states.reserve(N + 1);
  trajectory.inputs.reserve(N);

  Eigen::VectorXd x = x0;
  for (int k = 0; k <= N; ++k) {
    trajectory.times[k] = ocp.node_time(k);
  }
  for (int k = 0; k < N; ++k) {
    const double t = trajectory.times[k];
    Eigen::VectorXd u = policy.evaluate(k, x);
    if (ocp.input_projection) {
      u = ocp.input_projection(x, u, t);
    }
    trajectory.states.push_back(x);
    trajectory.inputs.push_back(u);
    x = rk4_step(ocp, x, u, t, h);
    if (!all_finite(x) || x.cwiseAbs().maxCoeff() > 1e12) {
      throw DivergenceError("rollout: state diverged at node " + std::to_string(k + 1),
                            k + 1);
    }
  }
  trajectory.states.push_back(x);
  return trajectory;
}

LqApproximation linearize(const OcpDefinition& ocp, const Trajectory& trajectory,
                          double fd_step) {
  const int N = ocp.nodes;
  const int n = ocp.state_dim;
  const int m = ocp.input_dim;

  LqApproximation lq;
  lq.dfdx.resize(N);
  lq.dfdu.resize(N);
  lq.state_grad.resize(N + 1);
  lq.state_hess.resize(N + 1);
  lq.input_grad.resize(N);
  lq.input_hess.resize(N);
  lq.dgdx.resize(N);
  lq.dgdu.resize(N);
  lq.residual.resize(N);

  for (int k = 0; k < N; ++k) {
    const double t = trajectory.times[k];
    const Eigen::VectorXd& x = trajectory.states[k];
    const Eigen::VectorXd& u = trajectory.inputs[k];

    // Dynamics Jacobians.
    if (ocp.dynamics_jacobian) {
      ocp.dynamics_jacobian(x, u, t, lq.dfdx[k], lq.dfdu[k]);
    } else {
      lq.dfdx[k].resize(n, n);
      lq.dfdu[k].resize(n, m);
      const Eigen::VectorXd sx = fd_scale_steps(x, fd_step);
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += sx[j];
        xm[j] -= sx[j];
        lq.dfdx[k].col(j) = (ocp.dynamics(xp, u, t) - ocp.dynamics(xm, u, t)) /
                            (2.0 * sx[j]);
      }
      const Eigen::VectorXd su = fd_scale_steps(u, fd_step);
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXd up = u, um = u;
        up[j] += su[j];
        um[j] -= su[j];
        lq.dfdu[k].col(j) = (ocp.dynamics(x, up, t) - ocp.dynamics(x, um, t)) /
                            (2.0 * su[j]);
      }
    }
    if (!lq.dfdx[k].allFinite() || !lq.dfdu[k].allFinite()) {
      throw DivergenceError("linearize: non-finite dynamics derivative at node " +
                                std::to_string(k),
                            k);
    }

    // Input cost expansion.
    if (ocp.input_cost_expansion) {
      ocp.input_cost_expansion(u, t, lq.input_grad[k], lq.input_hess[k]);
    } else {
      const Eigen::VectorXd su = fd_scale_steps(u, fd_step);
      lq.input_grad[k].resize(m);
      lq.input_hess[k].resize(m, m);
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd up = u, um = u;
        up[i] += su[i];
        um[i] -= su[i];
        lq.input_grad[k][i] =
            (ocp.input_cost(up, t) - ocp.input_cost(um, t)) / (2.0 * su[i]);
        for (int j = 0; j <= i; ++j) {
          Eigen::VectorXd upp = up, upm = up, ump = um, umm = um;
          upp[j] += su[j];
          upm[j] -= su[j];
          ump[j] += su[j];
          umm[j] -= su[j];
          const double hij = (ocp.input_cost(upp, t) - ocp.input_cost(upm, t) -
                              ocp.input_cost(ump, t) + ocp.input_cost(umm, t)) /
                             (4.0 * su[i] * su[j]);
          lq.input_hess[k](i, j) = hij;
          lq.input_hess[k](j, i) = hij;
        }
      }
    }

    // Constraints.
    if (ocp.equality_constraints) {
      lq.residual[k] = ocp.equality_constraints(x, u, t);
      const int rows = static_cast<int>(lq.residual[k].size());
      if (rows > m) {
        throw std::invalid_argument(
            "linearize: more equality rows than inputs at node " + std::to_string(k));
      }
      if (ocp.equality_constraint_jacobian) {
        ocp.equality_constraint_jacobian(x, u, t, lq.dgdx[k], lq.dgdu[k]);
      } else {
        lq.dgdx[k].resize(rows, n);
        lq.dgdu[k].resize(rows, m);
        const Eigen::VectorXd sx = fd_scale_steps(x, fd_step);
        for (int j = 0; j < n; ++j) {
          Eigen::VectorXd xp = x, xm = x;
          xp[j] += sx[j];
          xm[j] -= sx[j];
          lq.dgdx[k].col(j) = (ocp.equality_constraints(xp, u, t) -
                               ocp.equality_constraints(xm, u, t)) /
                              (2.0 * sx[j]);
        }
        const Eigen::VectorXd su = fd_scale_steps(u, fd_step);
        for (int j = 0; j < m; ++j) {
          Eigen::VectorXd up = u, um = u;
          up[j] += su[j];
          um[j] -= su[j];
          lq.dgdu[k].col(j) = (ocp.equality_constraints(x, up, t) -
                               ocp.equality_constraints(x, um, t)) /
                              (2.0 * su[j]);
        }
      }
    } else {
      lq.residual[k].resize(0);
      lq.dgdx[k].resize(0, n);
      lq.dgdu[k].resize(0, m);
    }
  }

  // State cost expansion at every node including the terminal one.
  for (int k = 0; k <= N; ++k) {
    const double t = trajectory.times[k];
    const Eigen::VectorXd& x = trajectory.states[k];
    if (ocp.state_cost_expansion) {
      ocp.state_cost_expansion(x, t, lq.state_grad[k], lq.state_hess[k]);
    } else {
      const Eigen::VectorXd sx = fd_scale_steps(x, fd_step);
      lq.state_grad[k].resize(n);
      lq.state_hess[k].resize(n, n);
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += sx[i];
        xm[i] -= sx[i];
        lq.state_grad[k][i] =
            (ocp.state_cost(xp, t) - ocp.state_cost(xm, t)) / (2.0 * sx[i]);
        for (int j = 0; j <= i; ++j) {
          Eigen::VectorXd xpp = xp, xpm = xp, xmp = xm, xmm = xm;
          xpp[j] += sx[j];
          xpm[j] -= sx[j];
          xmp[j] += sx[j];
          xmm[j] -= sx[j];
          const double hij = (ocp.state_cost(xpp, t) - ocp.state_cost(xpm, t) -
                              ocp.state_cost(xmp, t) + ocp.state_cost(xmm, t)) /
                             (4.0 * sx[i] * sx[j]);
          lq.state_hess[k](i, j) = hij;
          lq.state_hess[k](j, i) = hij;
        }
      }
    }
  }

  // Terminal cost.
  const Eigen::VectorXd& x_T = trajectory.states[N];
  if (ocp.terminal_cost_expansion) {
    ocp.terminal_cost_expansion(x_T, lq.terminal_grad, lq.terminal_hess);
  } else if (ocp.terminal_cost) {
    const Eigen::VectorXd sx = fd_scale_steps(x_T, fd_step);
    lq.terminal_grad.resize(n);
    lq.terminal_hess.resize(n, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x_T, xm = x_T;
      xp[i] += sx[i];
      xm[i] -= sx[i];
      lq.terminal_grad[i] =
          (ocp.terminal_cost(xp) - ocp.terminal_cost(xm)) / (2.0 * sx[i]);
      for (int j = 0; j <= i; ++j) {
        Eigen::VectorXd xpp = xp, xpm = xp, xmp = xm, xmm = xm;
        xpp[j] += sx[j];
        xpm[j] -= sx[j];
        xmp[j] += sx[j];
        xmm[j] -= sx[j];
        const double hij = (ocp.terminal_cost(xpp) - ocp.terminal_cost(xpm) -
                            ocp.terminal_cost(xmp) + ocp.terminal_cost(xmm)) /
                           (4.0 * sx[i] * sx[j]);
        lq.terminal_hess(i, j) = hij;
        lq.terminal_hess(j, i) = hij;
      }
    }
  } else {
    lq.terminal_grad = Eigen::VectorXd::Zero(n);
    lq.terminal_hess = Eigen::MatrixXd::Zero(n, n);
  }
  return lq;
}

BackwardPassResult backward_pass(const OcpDefinition& ocp,
                                 const LqApproximation& lq,
                                 double regularization) {
  const int N = ocp.nodes;
  const int n = ocp.state_dim;
  const int m = ocp.input_dim;
  const double h = ocp.dt();

  double rho = std::max(regularization, 0.0);

  BackwardPassResult result;
  result.feedforward_delta.resize(N);
  result.gains.resize(N);

  bool done = false;
  while (!done) {
    result.expected_decrease_linear = 0.0;
    result.expected_decrease_quadratic = 0.0;

    // Terminal value: Phi plus the trapezoidal tail of the running state cost.
    Eigen::MatrixXd P = lq.terminal_hess + state_weight(ocp, N) * lq.state_hess[N];
    Eigen::VectorXd p = lq.terminal_grad + state_weight(ocp, N) * lq.state_grad[N];

    bool needs_more_regularization = false;
    for (int k = N - 1; k >= 0; --k) {
      Eigen::MatrixXd A_d, B_d;
      discretize_transition(lq.dfdx[k], lq.dfdu[k], h, A_d, B_d);

      const double w = state_weight(ocp, k);
      const Eigen::VectorXd Q_x = w * lq.state_grad[k] + A_d.transpose() * p;
      const Eigen::VectorXd Q_u = h * lq.input_grad[k] + B_d.transpose() * p;
      const Eigen::MatrixXd Q_xx = w * lq.state_hess[k] + A_d.transpose() * P * A_d;
      const Eigen::MatrixXd Q_ux = B_d.transpose() * P * A_d;
      Eigen::MatrixXd Q_uu = h * lq.input_hess[k] + B_d.transpose() * P * B_d;
      Q_uu.diagonal().array() += rho;

      Eigen::VectorXd k_ff(m);
      Eigen::MatrixXd K(m, n);
      const int rows = static_cast<int>(lq.residual[k].size());
      if (rows > 0) {
        // Project the input update onto the affine set D du + C dx + e = 0.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            lq.dgdu[k], Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sigma = svd.singularValues();
        if (sigma[rows - 1] <= 1e-9 * std::max(sigma[0], 1.0)) {
          throw ConstraintDegeneracyError(
              "backward_pass: constraint Jacobian row-rank deficient at node " +
                  std::to_string(k),
              k);
        }
        Eigen::MatrixXd pinv = svd.matrixV().leftCols(rows) *
                               sigma.head(rows).cwiseInverse().asDiagonal() *
                               svd.matrixU().leftCols(rows).transpose();
        const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(m - rows);
        const Eigen::VectorXd du_p = -pinv * lq.residual[k];
        const Eigen::MatrixXd M = -pinv * lq.dgdx[k];
        if (m - rows > 0) {
          const Eigen::MatrixXd H = null_basis.transpose() * Q_uu * null_basis;
          Eigen::LLT<Eigen::MatrixXd> llt(H);
          if (llt.info() != Eigen::Success) {
            needs_more_regularization = true;
            break;
          }
          const Eigen::VectorXd g_w =
              null_basis.transpose() * (Q_u + Q_uu * du_p);
          const Eigen::MatrixXd G_w =
              null_basis.transpose() * (Q_ux + Q_uu * M);
          k_ff = du_p - null_basis * llt.solve(g_w);
          K = M - null_basis * llt.solve(G_w);
        } else {
          k_ff = du_p;
          K = M;
        }
      } else {
        Eigen::LLT<Eigen::MatrixXd> llt(Q_uu);
        if (llt.info() != Eigen::Success) {
          needs_more_regularization = true;
          break;
        }
        k_ff = -llt.solve(Q_u);
        K = -llt.solve(Q_ux);
      }

      result.feedforward_delta[k] = k_ff;
      result.gains[k] = K;
      result.expected_decrease_linear += k_ff.dot(Q_u);
      result.expected_decrease_quadratic += 0.5 * k_ff.dot(Q_uu * k_ff);

      p = Q_x + K.transpose() * Q_uu * k_ff + K.transpose() * Q_u +
          Q_ux.transpose() * k_ff;
      P = Q_xx + K.transpose() * Q_uu * K + K.transpose() * Q_ux +
          Q_ux.transpose() * K;
      P = 0.5 * (P + P.transpose()).eval();
    }

    if (!needs_more_regularization) {
      done = true;
    } else {
      rho = std::max(rho * 10.0, 1e-8);
      if (rho > kRegularizationCeiling) {
        throw SynthesisError(
            "backward_pass: input Hessian not positive definite even under "
            "maximal regularization");
      }
    }
  }
  result.regularization_used = rho;
  return result;
}

double trajectory_cost(const OcpDefinition& ocp, const Trajectory& trajectory) {
  const int N = ocp.nodes;
  const double h = ocp.dt();
  double cost = 0.0;
  for (int k = 0; k <= N; ++k) {
    cost += state_weight(ocp, k) * ocp.state_cost(trajectory.states[k],
                                                  trajectory.times[k]);
  }
  for (int k = 0; k < N; ++k) {
    cost += h * ocp.input_cost(trajectory.inputs[k], trajectory.times[k]);
  }
  if (ocp.terminal_cost) {
    cost += ocp.terminal_cost(trajectory.states[N]);
  }
  return cost;
}

ConstraintViolation constraint_violation(const OcpDefinition& ocp,
                                         const Trajectory& trajectory) {
  ConstraintViolation violation;
  if (!ocp.equality_constraints) {
    return violation;
  }
  for (int k = 0; k < trajectory.nodes(); ++k) {
    const Eigen::VectorXd g = ocp.equality_constraints(
        trajectory.states[k], trajectory.inputs[k], trajectory.times[k]);
    if (g.size() == 0) {
      continue;
    }
    violation.one_norm += g.lpNorm<1>();
    violation.inf_norm = std::max(violation.inf_norm, g.lpNorm<Eigen::Infinity>());
  }
  return violation;
}

namespace {

double merit_of(const OcpDefinition& ocp, const Trajectory& trajectory,
                const SolverSettings& settings, double* cost_out,
                double* violation_inf_out) {
  const double cost = trajectory_cost(ocp, trajectory);
  const ConstraintViolation violation = constraint_violation(ocp, trajectory);
  if (cost_out != nullptr) {
    *cost_out = cost;
  }
  if (violation_inf_out != nullptr) {
    *violation_inf_out = violation.inf_norm;
  }
  return cost + settings.merit_constraint_penalty * violation.one_norm;
}

FeedbackPolicy candidate_policy(const Trajectory& current,
                                const BackwardPassResult& direction, double alpha) {
  FeedbackPolicy policy;
  policy.times = current.times;
  policy.nominal_states = current.states;
  policy.feedforward.resize(current.nodes());
  policy.gains = direction.gains;
  for (int k = 0; k < current.nodes(); ++k) {
    policy.feedforward[k] =
        current.inputs[k] + alpha * direction.feedforward_delta[k];
  }
  return policy;
}

}  // namespace

LineSearchResult line_search(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                             const Trajectory& current,
                             const BackwardPassResult& direction,
                             const SolverSettings& settings) {
  LineSearchResult result;
  double current_cost = 0.0;
  const double current_merit = merit_of(ocp, current, settings, &current_cost, nullptr);

  double alpha = 1.0;
  for (int step = 0; step <= settings.line_search_steps; ++step) {
    Trajectory candidate;
    try {
      candidate = rollout(ocp, x0, candidate_policy(current, direction, alpha));
    } catch (const DivergenceError&) {
      alpha *= settings.line_search_factor;
      continue;
    }
    double cost = 0.0;
    const double merit = merit_of(ocp, candidate, settings, &cost, nullptr);
    if (merit < current_merit - 1e-14 * (1.0 + std::abs(current_merit))) {
      result.trajectory = std::move(candidate);
      result.step_size = alpha;
      result.cost = cost;
      result.merit = merit;
      return result;
    }
    alpha *= settings.line_search_factor;
  }

  result.trajectory = current;
  result.step_size = 0.0;
  result.cost = current_cost;
  result.merit = current_merit;
  return result;
}

namespace {

FeedbackPolicy initial_policy(const OcpDefinition& ocp) {
  const int N = ocp.nodes;
  Eigen::VectorXd times(N + 1);
  for (int k = 0; k <= N; ++k) {
    times[k] = ocp.node_time(k);
  }
  std::vector<Eigen::VectorXd> inputs(N);
  for (int k = 0; k < N; ++k) {
    inputs[k] = ocp.initial_input ? ocp.initial_input(times[k])
                                  : Eigen::VectorXd::Zero(ocp.input_dim);
  }
  return FeedbackPolicy::open_loop(times, std::move(inputs), ocp.state_dim);
}

// One rollout-linearize-backward-line-search cycle shared by solve and
// mpc_step. Returns the accepted step size, 0 when none was accepted.
double iterate_once(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                    const SolverSettings& settings, Trajectory& trajectory,
                    BackwardPassResult& direction, double& rho, double& cost,
                    double& merit, double& violation_inf) {
  const LqApproximation lq =
      linearize(ocp, trajectory, settings.finite_difference_step);
  direction = backward_pass(ocp, lq, rho);
  rho = direction.regularization_used;
  const LineSearchResult ls = line_search(ocp, x0, trajectory, direction, settings);
  if (ls.step_size == 0.0) {
    rho = std::max(rho * 10.0, 1e-8);
    cost = ls.cost;
    merit = ls.merit;
    return 0.0;
  }
  trajectory = ls.trajectory;
  cost = ls.cost;
  merit = ls.merit;
  const ConstraintViolation violation = constraint_violation(ocp, trajectory);
  violation_inf = violation.inf_norm;
  rho = std::max(rho * 0.5, settings.regularization_floor);
  return ls.step_size;
}

FeedbackPolicy policy_around(const Trajectory& trajectory,
                             const BackwardPassResult& direction) {
  FeedbackPolicy policy;
  policy.times = trajectory.times;
  policy.nominal_states = trajectory.states;
  policy.feedforward = trajectory.inputs;
  policy.gains = direction.gains;
  return policy;
}

}  // namespace

SolveResult solve(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                  const SolverSettings& settings, const FeedbackPolicy* warm_start) {
  ocp.validate();
  settings.validate();

  SolveResult result;
  const FeedbackPolicy start_policy =
      warm_start != nullptr ? *warm_start : initial_policy(ocp);
  result.trajectory = rollout(ocp, x0, start_policy);

  double rho = settings.regularization_initial;
  double cost = 0.0;
  double violation_inf = constraint_violation(ocp, result.trajectory).inf_norm;
  double merit = merit_of(ocp, result.trajectory, settings, &cost, nullptr);

  BackwardPassResult direction;
  for (int iteration = 1; iteration <= settings.max_iterations; ++iteration) {
    const double previous_cost = cost;
    const double step = iterate_once(ocp, x0, settings, result.trajectory,
                                     direction, rho, cost, merit, violation_inf);

    IterationRecord record;
    record.iteration = iteration;
    record.cost = cost;
    record.merit = merit;
    record.step_size = step;
    record.constraint_violation = violation_inf;
    record.regularization = rho;
    result.iterations.push_back(record);

    if (step == 0.0) {
      // No improving step: stationary if the predicted decrease is negligible,
      // otherwise retry under stiffer regularization.
      const double expected = std::abs(direction.expected_decrease_linear) +
                              std::abs(direction.expected_decrease_quadratic);
      if (expected < settings.cost_decrease_tolerance * (1.0 + std::abs(cost))) {
        result.converged = true;
        break;
      }
      if (rho > kRegularizationCeiling) {
        break;
      }
      continue;
    }
    if (std::abs(previous_cost - cost) <
        settings.cost_decrease_tolerance * (1.0 + std::abs(cost))) {
      result.converged = true;
      break;
    }
  }

  result.policy = policy_around(result.trajectory, direction);
  result.cost = cost;
  result.merit = merit;
  result.constraint_violation = violation_inf;
  return result;
}

FeedbackPolicy shift_policy(const FeedbackPolicy& policy,
                            const Eigen::VectorXd& new_times) {
  const int N_new = static_cast<int>(new_times.size()) - 1;
  const int N_old = policy.nodes();
  const double t0 = policy.times[0];
  const double h = policy.times[1] - policy.times[0];

  FeedbackPolicy shifted;
  shifted.times = new_times;
  shifted.feedforward.resize(N_new);
  shifted.gains.resize(N_new);
  shifted.nominal_states.resize(N_new + 1);
  for (int k = 0; k <= N_new; ++k) {
    // Zero-order-hold indexing into the old grid, terminal values held.
    const int src = std::min(
        std::max(static_cast<int>(std::floor((new_times[k] - t0) / h + 1e-9)), 0),
        N_old);
    shifted.nominal_states[k] = policy.nominal_states[src];
    if (k < N_new) {
      const int src_in = std::min(src, N_old - 1);
      shifted.feedforward[k] = policy.feedforward[src_in];
      shifted.gains[k] = policy.gains[src_in];
    }
  }
  return shifted;
}

SolveResult mpc_step(const OcpDefinition& ocp, const Eigen::VectorXd& x0,
                     const SolveResult& previous, const SolverSettings& settings) {
  ocp.validate();
  settings.validate();

  Eigen::VectorXd times(ocp.nodes + 1);
  for (int k = 0; k <= ocp.nodes; ++k) {
    times[k] = ocp.node_time(k);
  }
  const FeedbackPolicy warm = shift_policy(previous.policy, times);

  SolveResult result;
  result.trajectory = rollout(ocp, x0, warm);

  double rho = std::max(settings.regularization_initial,
                        settings.regularization_floor);
  double cost = 0.0;
  double violation_inf = constraint_violation(ocp, result.trajectory).inf_norm;
  double merit = merit_of(ocp, result.trajectory, settings, &cost, nullptr);

  BackwardPassResult direction;
  const double step = iterate_once(ocp, x0, settings, result.trajectory,
                                   direction, rho, cost, merit, violation_inf);

  IterationRecord record;
  record.iteration = 1;
  record.cost = cost;
  record.merit = merit;
  record.step_size = step;
  record.constraint_violation = violation_inf;
  record.regularization = rho;
  result.iterations.push_back(record);

  result.policy = policy_around(result.trajectory, direction);
  result.cost = cost;
  result.merit = merit;
  result.constraint_violation = violation_inf;
  result.converged = step == 0.0;  // no improving step: warm start already stationary
  return result;
}

std::string iteration_log_csv(const std::vector<IterationRecord>& records) {
  std::ostringstream out;
  out << "iteration,cost,merit,step_size,constraint_violation\n";
  out.precision(17);
  for (const auto& record : records) {
    out << record.iteration << ',' << record.cost << ',' << record.merit << ','
        << record.step_size << ',' << record.constraint_violation << '\n';
  }
  return out.str();
}

}  // namespace fsmpc
