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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "fsmpc/common/errors.hpp"
#include "fsmpc/lti/lqr.hpp"
#include "fsmpc/slq/slq.hpp"

namespace fsmpc {
namespace {

// RK4 response of a frozen linear system over one step; used by the KKT
// oracle below so it shares no code with the solver.
void rk4_linear_step(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double h,
                     Eigen::MatrixXd& A_d, Eigen::MatrixXd& B_d) {
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd hA = h * A;
  A_d = I + hA + hA * hA / 2.0 + hA * hA * hA / 6.0 + hA * hA * hA * hA / 24.0;
  B_d = h * (I + hA / 2.0 + hA * hA / 6.0 + hA * hA * hA / 24.0) * B;
}

OcpDefinition lti_ocp(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      const Eigen::MatrixXd& Q_f, double horizon, int nodes) {
  OcpDefinition ocp;
  ocp.state_dim = static_cast<int>(A.rows());
  ocp.input_dim = static_cast<int>(B.cols());
  ocp.horizon = horizon;
  ocp.nodes = nodes;
  ocp.dynamics = [A, B](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double) {
    return (A * x + B * u).eval();
  };
  ocp.dynamics_jacobian = [A, B](const Eigen::VectorXd&, const Eigen::VectorXd&,
                                 double, Eigen::MatrixXd& dfdx,
                                 Eigen::MatrixXd& dfdu) {
    dfdx = A;
    dfdu = B;
  };
  ocp.state_cost = [Q](const Eigen::VectorXd& x, double) {
    return 0.5 * x.dot(Q * x);
  };
  ocp.state_cost_expansion = [Q](const Eigen::VectorXd& x, double, Eigen::VectorXd& g,
                                 Eigen::MatrixXd& H) {
    g = Q * x;
    H = Q;
  };
  ocp.input_cost = [R](const Eigen::VectorXd& u, double) {
    return 0.5 * u.dot(R * u);
  };
  ocp.input_cost_expansion = [R](const Eigen::VectorXd& u, double, Eigen::VectorXd& g,
                                 Eigen::MatrixXd& H) {
    g = R * u;
    H = R;
  };
  ocp.terminal_cost = [Q_f](const Eigen::VectorXd& x) { return 0.5 * x.dot(Q_f * x); };
  ocp.terminal_cost_expansion = [Q_f](const Eigen::VectorXd& x, Eigen::VectorXd& g,
                                      Eigen::MatrixXd& H) {
    g = Q_f * x;
    H = Q_f;
  };
  return ocp;
}

TEST(Rollout, ZeroDynamicsHoldsState) {
  OcpDefinition ocp;
  ocp.state_dim = 2;
  ocp.input_dim = 1;
  ocp.horizon = 1.0;
  ocp.nodes = 10;
  ocp.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, double) {
    return Eigen::VectorXd::Zero(x.size()).eval();
  };
  ocp.state_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_cost = [](const Eigen::VectorXd&, double) { return 0.0; };

  Eigen::VectorXd x0(2);
  x0 << 1.0, -2.0;
  Eigen::VectorXd times(11);
  for (int k = 0; k <= 10; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(10, Eigen::VectorXd::Zero(1)), 2);
  const auto traj = rollout(ocp, x0, policy);
  for (const auto& x : traj.states) {
    EXPECT_EQ(x, x0);
  }
}

TEST(Rollout, ConstantInputIntegratorIsExact) {
  OcpDefinition ocp;
  ocp.state_dim = 1;
  ocp.input_dim = 1;
  ocp.horizon = 1.0;
  ocp.nodes = 20;
  ocp.dynamics = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, double) {
    return u;
  };
  ocp.state_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_cost = [](const Eigen::VectorXd&, double) { return 0.0; };

  Eigen::VectorXd x0(1);
  x0 << 0.5;
  Eigen::VectorXd times(21);
  for (int k = 0; k <= 20; ++k) times[k] = 0.05 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(20, Eigen::VectorXd::Ones(1)), 1);
  const auto traj = rollout(ocp, x0, policy);
  EXPECT_NEAR(traj.states.back()[0], 1.5, 1e-10);
}

TEST(Rollout, ProjectionHookClampsInput) {
  OcpDefinition ocp;
  ocp.state_dim = 1;
  ocp.input_dim = 1;
  ocp.horizon = 0.5;
  ocp.nodes = 5;
  ocp.dynamics = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, double) {
    return u;
  };
  ocp.state_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_projection = [](const Eigen::VectorXd&, const Eigen::VectorXd& u,
                            double) {
    return u.cwiseMax(-1.0).cwiseMin(1.0).eval();
  };

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd times(6);
  for (int k = 0; k <= 5; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(5, Eigen::VectorXd::Constant(1, 2.0)), 1);
  const auto traj = rollout(ocp, x0, policy);
  for (const auto& u : traj.inputs) {
    EXPECT_DOUBLE_EQ(u[0], 1.0);
  }
}

TEST(Rollout, DivergenceCarriesNodeIndex) {
  OcpDefinition ocp;
  ocp.state_dim = 1;
  ocp.input_dim = 1;
  ocp.horizon = 1.0;
  ocp.nodes = 10;
  ocp.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, double) {
    return (x.array() * x.array() * 100.0).matrix().eval();  // finite-time blowup
  };
  ocp.state_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_cost = [](const Eigen::VectorXd&, double) { return 0.0; };

  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 5.0);
  Eigen::VectorXd times(11);
  for (int k = 0; k <= 10; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(10, Eigen::VectorXd::Zero(1)), 1);
  try {
    rollout(ocp, x0, policy);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& error) {
    EXPECT_GE(error.node(), 1);
    EXPECT_LE(error.node(), 10);
  }
}

TEST(Linearize, LinearSystemIsExact) {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.1, 1.0, -2.0, -0.3;
  B << 0.0, 1.0;
  auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(2, 2),
                     Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(2, 2),
                     1.0, 10);
  ocp.dynamics_jacobian = nullptr;  // force finite differences

  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  Eigen::VectorXd times(11);
  for (int k = 0; k <= 10; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(10, Eigen::VectorXd::Zero(1)), 2);
  const auto traj = rollout(ocp, x0, policy);
  const auto lq = linearize(ocp, traj);
  for (int k = 0; k < 10; ++k) {
    EXPECT_LE((lq.dfdx[k] - A).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LE((lq.dfdu[k] - B).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(Linearize, AnalyticMatchesFiniteDifferences) {
  // Nonlinear model with hand-written Jacobians, checked on random points.
  OcpDefinition ocp;
  ocp.state_dim = 2;
  ocp.input_dim = 1;
  ocp.horizon = 1.0;
  ocp.nodes = 1;
  ocp.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double) {
    Eigen::VectorXd dx(2);
    dx << x[1], std::sin(x[0]) - 0.4 * x[1] + u[0];
    return dx;
  };
  ocp.dynamics_jacobian = [](const Eigen::VectorXd& x, const Eigen::VectorXd&,
                             double, Eigen::MatrixXd& dfdx, Eigen::MatrixXd& dfdu) {
    dfdx.resize(2, 2);
    dfdx << 0.0, 1.0, std::cos(x[0]), -0.4;
    dfdu.resize(2, 1);
    dfdu << 0.0, 1.0;
  };
  ocp.state_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_cost = [](const Eigen::VectorXd&, double) { return 0.0; };

  auto fd_ocp = ocp;
  fd_ocp.dynamics_jacobian = nullptr;

  std::mt19937 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Trajectory traj;
    traj.times.resize(2);
    traj.times << 0.0, 1.0;
    Eigen::VectorXd x(2), u(1);
    x << gauss(rng), gauss(rng);
    u << gauss(rng);
    traj.states = {x, x};
    traj.inputs = {u};
    const auto analytic = linearize(ocp, traj);
    const auto fd = linearize(fd_ocp, traj);
    const double scale = analytic.dfdx[0].cwiseAbs().maxCoeff();
    EXPECT_LE((analytic.dfdx[0] - fd.dfdx[0]).cwiseAbs().maxCoeff(), 1e-5 * scale);
    EXPECT_LE((analytic.dfdu[0] - fd.dfdu[0]).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Linearize, QuadraticCostGradientVanishesAtMinimum) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd B(2, 1);
  B << 1.0, 1.0;
  const auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(2, 2),
                           Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Zero(2, 2), 1.0, 2);
  Trajectory traj;
  traj.times.resize(3);
  traj.times << 0.0, 0.5, 1.0;
  traj.states = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                 Eigen::VectorXd::Zero(2)};
  traj.inputs = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  const auto lq = linearize(ocp, traj);
  EXPECT_DOUBLE_EQ(lq.state_grad[0].norm(), 0.0);
  EXPECT_DOUBLE_EQ(lq.input_grad[0].norm(), 0.0);
}

TEST(BackwardPass, StationaryGainMatchesRiccatiOracle) {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.0, 1.0, -2.0, -3.0;
  B << 0.0, 1.0;
  const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(1, 1);
  const auto oracle = lqr_gain(A, B, Q, R);

  const int N = 80000;
  const auto ocp = lti_ocp(A, B, Q, R, Eigen::MatrixXd::Zero(2, 2), 8.0, N);
  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  Eigen::VectorXd times(N + 1);
  for (int k = 0; k <= N; ++k) times[k] = ocp.node_time(k);
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(N, Eigen::VectorXd::Zero(1)), 2);
  const auto traj = rollout(ocp, x0, policy);
  const auto lq = linearize(ocp, traj);
  const auto bp = backward_pass(ocp, lq, 0.0);
  // Feedback gain of the recursion at the far end approximates the
  // infinite-horizon gain; note the sign convention u = u_bar + K (x - x_bar)
  // versus u = -K x of the oracle.
  EXPECT_LE((bp.gains[0] + oracle.K).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(BackwardPass, FullyConstrainedInputIsZeroed) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << 0.0;
  B << 1.0;
  auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(1, 1),
                     Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1),
                     1.0, 10);
  ocp.equality_constraints = [](const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                double) { return u; };
  ocp.equality_constraint_jacobian = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                                        double, Eigen::MatrixXd& dgdx,
                                        Eigen::MatrixXd& dgdu) {
    dgdx = Eigen::MatrixXd::Zero(1, 1);
    dgdu = Eigen::MatrixXd::Identity(1, 1);
  };

  Eigen::VectorXd x0(1);
  x0 << 1.0;
  Eigen::VectorXd times(11);
  for (int k = 0; k <= 10; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(10, Eigen::VectorXd::Constant(1, 0.7)), 1);
  const auto traj = rollout(ocp, x0, policy);
  const auto lq = linearize(ocp, traj);
  const auto bp = backward_pass(ocp, lq, 0.0);
  for (int k = 0; k < 10; ++k) {
    // u + delta = 0 exactly, and no feedback escapes the constraint.
    EXPECT_NEAR(traj.inputs[k][0] + bp.feedforward_delta[k][0], 0.0, 1e-12);
    EXPECT_NEAR(bp.gains[k].cwiseAbs().maxCoeff(), 0.0, 1e-12);
  }
}

TEST(BackwardPass, SingleNodeConstraintSatisfiedExactly) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << 0.0;
  B << 1.0;
  auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(1, 1),
                     Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1),
                     1.0, 10);
  const double dt = ocp.dt();
  ocp.equality_constraints = [dt](const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                  double t) {
    if (std::abs(t - 0.5) < 0.25 * dt) {
      return (u.array() - 5.0).matrix().eval();
    }
    return Eigen::VectorXd(0).eval();
  };
  ocp.equality_constraint_jacobian = [dt](const Eigen::VectorXd&,
                                          const Eigen::VectorXd&, double t,
                                          Eigen::MatrixXd& dgdx,
                                          Eigen::MatrixXd& dgdu) {
    const int rows = std::abs(t - 0.5) < 0.25 * dt ? 1 : 0;
    dgdx = Eigen::MatrixXd::Zero(rows, 1);
    dgdu = Eigen::MatrixXd::Identity(rows, 1);
  };

  Eigen::VectorXd x0(1);
  x0 << 0.0;
  Eigen::VectorXd times(11);
  for (int k = 0; k <= 10; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(10, Eigen::VectorXd::Zero(1)), 1);
  const auto traj = rollout(ocp, x0, policy);
  const auto lq = linearize(ocp, traj);
  const auto bp = backward_pass(ocp, lq, 0.0);
  EXPECT_NEAR(traj.inputs[5][0] + bp.feedforward_delta[5][0], 5.0, 1e-10);
}

TEST(BackwardPass, DegenerateConstraintRowsThrow) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << 0.0;
  B << 1.0;
  auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(1, 1),
                     Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1),
                     1.0, 4);
  // Constraint with zero input Jacobian: rank deficient in the input space.
  ocp.equality_constraints = [](const Eigen::VectorXd& x, const Eigen::VectorXd&,
                                double) {
    return (x.array() - 1.0).matrix().eval();
  };
  Eigen::VectorXd x0(1);
  x0 << 0.0;
  Eigen::VectorXd times(5);
  for (int k = 0; k <= 4; ++k) times[k] = 0.25 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(4, Eigen::VectorXd::Zero(1)), 1);
  const auto traj = rollout(ocp, x0, policy);
  const auto lq = linearize(ocp, traj);
  EXPECT_THROW(backward_pass(ocp, lq, 0.0), ConstraintDegeneracyError);
}

TEST(LineSearch, FullStepAcceptedOnLqProblem) {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.0, 1.0, 0.0, 0.0;
  B << 0.0, 1.0;
  const auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(2, 2),
                           Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(2, 2), 2.0, 50);
  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  const SolverSettings settings;
  const auto result = solve(ocp, x0, settings);
  ASSERT_FALSE(result.iterations.empty());
  EXPECT_DOUBLE_EQ(result.iterations[0].step_size, 1.0);
}

TEST(LineSearch, FractionalStepOnPathologicalProblem) {
  // Cubic input nonlinearity: the LQ model around u = 0 predicts x1 = u, the
  // true map is u + 2u^3, so the full step badly overshoots the target and a
  // fractional step must be taken.
  OcpDefinition ocp;
  ocp.state_dim = 1;
  ocp.input_dim = 1;
  ocp.horizon = 1.0;
  ocp.nodes = 1;
  ocp.dynamics = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, double) {
    return (u.array() + 2.0 * u.array().pow(3)).matrix().eval();
  };
  ocp.state_cost = [](const Eigen::VectorXd&, double) { return 0.0; };
  ocp.input_cost = [](const Eigen::VectorXd& u, double) {
    return 0.5 * 1e-3 * u.squaredNorm();
  };
  ocp.terminal_cost = [](const Eigen::VectorXd& x) {
    return 0.5 * (x[0] - 1.0) * (x[0] - 1.0);
  };

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const SolverSettings settings;
  const auto result = solve(ocp, x0, settings);

  ASSERT_FALSE(result.iterations.empty());
  EXPECT_GT(result.iterations[0].step_size, 0.0);
  EXPECT_LT(result.iterations[0].step_size, 1.0);
  double previous_merit = std::numeric_limits<double>::infinity();
  for (const auto& record : result.iterations) {
    if (record.step_size > 0.0) {
      EXPECT_LT(record.merit, previous_merit);
      previous_merit = record.merit;
    }
  }
}

TEST(LineSearch, ConvergedProblemTakesNoStep) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << -1.0;
  B << 1.0;
  const auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Zero(1, 1), 1.0, 10);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);  // already at the optimum
  Eigen::VectorXd times(11);
  for (int k = 0; k <= 10; ++k) times[k] = 0.1 * k;
  auto policy = FeedbackPolicy::open_loop(
      times, std::vector<Eigen::VectorXd>(10, Eigen::VectorXd::Zero(1)), 1);
  const auto traj = rollout(ocp, x0, policy);
  const auto lq = linearize(ocp, traj);
  const auto bp = backward_pass(ocp, lq, 1e-6);
  const SolverSettings settings;
  const auto ls = line_search(ocp, x0, traj, bp, settings);
  EXPECT_DOUBLE_EQ(ls.step_size, 0.0);
  for (size_t k = 0; k < traj.inputs.size(); ++k) {
    EXPECT_EQ(ls.trajectory.inputs[k], traj.inputs[k]);
  }
}

TEST(Solve, LtiProblemConvergesInTwoIterations) {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.0, 1.0, -1.0, -1.0;
  B << 0.0, 1.0;
  const auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(2, 2),
                           Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(2, 2), 3.0, 100);
  Eigen::VectorXd x0(2);
  x0 << 2.0, -1.0;
  const SolverSettings settings;
  const auto result = solve(ocp, x0, settings);
  EXPECT_TRUE(result.converged);
  EXPECT_LE(result.iterations.size(), 2u);
}

// Dense KKT solve of the discrete LQ problem assembled independently from the
// OCP data; the solver must land on the same constrained optimum.
TEST(Solve, ConstrainedLqMatchesKktOracle) {
  const int n = 2, m = 2, N = 20;
  const double T = 1.0, h = T / N;
  Eigen::MatrixXd A(2, 2), B(2, 2);
  A << 0.0, 1.0, -1.0, -0.5;
  B << 0.0, 0.1, 1.0, 0.3;
  const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd Q_f = 2.0 * Eigen::MatrixXd::Identity(n, n);

  auto ocp = lti_ocp(A, B, Q, R, Q_f, T, N);
  // One equality row: u0 + u1 = 1 at every node.
  ocp.equality_constraints = [](const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                double) {
    Eigen::VectorXd g(1);
    g << u[0] + u[1] - 1.0;
    return g;
  };

  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.5;
  SolverSettings settings;
  settings.cost_decrease_tolerance = 1e-12;
  settings.max_iterations = 20;
  const auto result = solve(ocp, x0, settings);
  EXPECT_LE(result.constraint_violation, 1e-8);

  // Oracle: stacked variables z = (x_1..x_N, u_0..u_N-1).
  Eigen::MatrixXd A_d, B_d;
  rk4_linear_step(A, B, h, A_d, B_d);
  const int nx = n * N, nu = m * N;
  const int n_dyn = n * N, n_con = N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nx + nu, nx + nu);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nx + nu);
  for (int k = 1; k <= N; ++k) {
    const double w = (k == N) ? 0.5 * h : h;
    H.block((k - 1) * n, (k - 1) * n, n, n) = w * Q;
    if (k == N) {
      H.block((k - 1) * n, (k - 1) * n, n, n) += Q_f;
    }
  }
  for (int k = 0; k < N; ++k) {
    H.block(nx + k * m, nx + k * m, m, m) = h * R;
  }
  Eigen::MatrixXd A_eq = Eigen::MatrixXd::Zero(n_dyn + n_con, nx + nu);
  Eigen::VectorXd b_eq = Eigen::VectorXd::Zero(n_dyn + n_con);
  for (int k = 0; k < N; ++k) {
    // x_{k+1} = A_d x_k + B_d u_k
    A_eq.block(k * n, k * n, n, n) = -Eigen::MatrixXd::Identity(n, n);
    if (k > 0) {
      A_eq.block(k * n, (k - 1) * n, n, n) = A_d;
    } else {
      b_eq.segment(0, n) = -A_d * x0;
    }
    A_eq.block(k * n, nx + k * m, n, m) = B_d;
    // u0 + u1 = 1
    A_eq(n_dyn + k, nx + k * m + 0) = 1.0;
    A_eq(n_dyn + k, nx + k * m + 1) = 1.0;
    b_eq(n_dyn + k) = 1.0;
  }
  const int dim = nx + nu + n_dyn + n_con;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
  kkt.topLeftCorner(nx + nu, nx + nu) = H;
  kkt.topRightCorner(nx + nu, n_dyn + n_con) = A_eq.transpose();
  kkt.bottomLeftCorner(n_dyn + n_con, nx + nu) = A_eq;
  Eigen::VectorXd rhs(dim);
  rhs << -g, b_eq;
  const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);

  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd u_oracle = sol.segment(nx + k * m, m);
    EXPECT_LE((result.trajectory.inputs[k] - u_oracle).lpNorm<Eigen::Infinity>(),
              1e-6)
        << "node " << k;
    const Eigen::VectorXd x_oracle = sol.segment(k * n, n);
    EXPECT_LE((result.trajectory.states[k + 1] - x_oracle).lpNorm<Eigen::Infinity>(),
              1e-6)
        << "node " << k + 1;
  }
}

// --- Pendulum swing-up against an independent direct-transcription oracle ---

OcpDefinition pendulum_ocp(int nodes, double horizon) {
  OcpDefinition ocp;
  ocp.state_dim = 2;
  ocp.input_dim = 1;
  ocp.horizon = horizon;
  ocp.nodes = nodes;
  // Angle measured from the upright; gravity destabilizes.
  ocp.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double) {
    Eigen::VectorXd dx(2);
    dx << x[1], 9.81 * std::sin(x[0]) - 0.2 * x[1] + u[0];
    return dx;
  };
  ocp.dynamics_jacobian = [](const Eigen::VectorXd& x, const Eigen::VectorXd&,
                             double, Eigen::MatrixXd& dfdx, Eigen::MatrixXd& dfdu) {
    dfdx.resize(2, 2);
    dfdx << 0.0, 1.0, 9.81 * std::cos(x[0]), -0.2;
    dfdu.resize(2, 1);
    dfdu << 0.0, 1.0;
  };
  ocp.state_cost = [](const Eigen::VectorXd& x, double) {
    return 0.5 * (x[0] * x[0] + 0.1 * x[1] * x[1]);
  };
  ocp.state_cost_expansion = [](const Eigen::VectorXd& x, double, Eigen::VectorXd& g,
                                Eigen::MatrixXd& H) {
    g.resize(2);
    g << x[0], 0.1 * x[1];
    H.resize(2, 2);
    H << 1.0, 0.0, 0.0, 0.1;
  };
  ocp.input_cost = [](const Eigen::VectorXd& u, double) {
    return 0.5 * 0.01 * u.squaredNorm();
  };
  ocp.input_cost_expansion = [](const Eigen::VectorXd& u, double, Eigen::VectorXd& g,
                                Eigen::MatrixXd& H) {
    g = 0.01 * u;
    H = 0.01 * Eigen::MatrixXd::Identity(1, 1);
  };
  ocp.terminal_cost = [](const Eigen::VectorXd& x) {
    return 0.5 * (10.0 * x[0] * x[0] + 1.0 * x[1] * x[1]);
  };
  ocp.terminal_cost_expansion = [](const Eigen::VectorXd& x, Eigen::VectorXd& g,
                                   Eigen::MatrixXd& H) {
    g.resize(2);
    g << 10.0 * x[0], 1.0 * x[1];
    H.resize(2, 2);
    H << 10.0, 0.0, 0.0, 1.0;
  };
  return ocp;
}

// Gauss-Newton SQP on the stacked transcription with RK4 defect constraints;
// shares only the problem definition with the solver under test.
double direct_transcription_cost(const OcpDefinition& ocp, const Eigen::VectorXd& x0) {
  const int n = ocp.state_dim, m = ocp.input_dim, N = ocp.nodes;
  const double h = ocp.dt();
  auto rk4 = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
    const Eigen::VectorXd k1 = ocp.dynamics(x, u, t);
    const Eigen::VectorXd k2 = ocp.dynamics(x + 0.5 * h * k1, u, t + 0.5 * h);
    const Eigen::VectorXd k3 = ocp.dynamics(x + 0.5 * h * k2, u, t + 0.5 * h);
    const Eigen::VectorXd k4 = ocp.dynamics(x + h * k3, u, t + h);
    return (x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };

  // Decision vector z = (x_1..x_N, u_0..u_N-1), initialized from a zero-input
  // rollout.
  const int nx = n * N, nu = m * N;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nx + nu);
  {
    Eigen::VectorXd x = x0;
    for (int k = 0; k < N; ++k) {
      x = rk4(x, Eigen::VectorXd::Zero(m), ocp.node_time(k));
      z.segment(k * n, n) = x;
    }
  }

  auto state_of = [&](const Eigen::VectorXd& zz, int k) -> Eigen::VectorXd {
    return k == 0 ? x0 : zz.segment((k - 1) * n, n).eval();
  };
  auto input_of = [&](const Eigen::VectorXd& zz, int k) -> Eigen::VectorXd {
    return zz.segment(nx + k * m, m).eval();
  };

  auto total_cost = [&](const Eigen::VectorXd& zz) {
    double cost = 0.0;
    for (int k = 0; k <= N; ++k) {
      const double w = (k == 0 || k == N) ? 0.5 * h : h;
      cost += w * ocp.state_cost(state_of(zz, k), ocp.node_time(k));
    }
    for (int k = 0; k < N; ++k) {
      cost += h * ocp.input_cost(input_of(zz, k), ocp.node_time(k));
    }
    return cost + ocp.terminal_cost(state_of(zz, N));
  };
  auto defects = [&](const Eigen::VectorXd& zz) {
    Eigen::VectorXd c(n * N);
    for (int k = 0; k < N; ++k) {
      c.segment(k * n, n) =
          state_of(zz, k + 1) - rk4(state_of(zz, k), input_of(zz, k), ocp.node_time(k));
    }
    return c;
  };

  const double fd = 1e-6;
  for (int sqp_iter = 0; sqp_iter < 80; ++sqp_iter) {
    // Gauss-Newton KKT system with finite-difference defect Jacobian.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n * N, nx + nu);
    const Eigen::VectorXd c0 = defects(z);
    for (int j = 0; j < nx + nu; ++j) {
      Eigen::VectorXd zp = z, zm = z;
      const double step = fd * (1.0 + std::abs(z[j]));
      zp[j] += step;
      zm[j] -= step;
      J.col(j) = (defects(zp) - defects(zm)) / (2.0 * step);
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nx + nu, nx + nu);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nx + nu);
    for (int k = 1; k <= N; ++k) {
      const double w = (k == N) ? 0.5 * h : h;
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      ocp.state_cost_expansion(state_of(z, k), ocp.node_time(k), grad, hess);
      H.block((k - 1) * n, (k - 1) * n, n, n) += w * hess;
      g.segment((k - 1) * n, n) += w * grad;
      if (k == N) {
        ocp.terminal_cost_expansion(state_of(z, k), grad, hess);
        H.block((k - 1) * n, (k - 1) * n, n, n) += hess;
        g.segment((k - 1) * n, n) += grad;
      }
    }
    for (int k = 0; k < N; ++k) {
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      ocp.input_cost_expansion(input_of(z, k), ocp.node_time(k), grad, hess);
      H.block(nx + k * m, nx + k * m, m, m) += h * hess;
      g.segment(nx + k * m, m) += h * grad;
    }
    const int dim = nx + nu + n * N;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    kkt.topLeftCorner(nx + nu, nx + nu) = H;
    kkt.topRightCorner(nx + nu, n * N) = J.transpose();
    kkt.bottomLeftCorner(n * N, nx + nu) = J;
    Eigen::VectorXd rhs(dim);
    rhs << -g, -c0;
    const Eigen::VectorXd dz = kkt.fullPivLu().solve(rhs).head(nx + nu);

    // Backtracking on an l1 merit.
    const double merit0 = total_cost(z) + 10.0 * c0.lpNorm<1>();
    double alpha = 1.0;
    bool stepped = false;
    for (int ls = 0; ls < 12; ++ls) {
      const Eigen::VectorXd trial = z + alpha * dz;
      const double merit =
          total_cost(trial) + 10.0 * defects(trial).lpNorm<1>();
      if (merit < merit0 - 1e-14) {
        z = trial;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped || dz.lpNorm<Eigen::Infinity>() < 1e-10) {
      break;
    }
  }
  EXPECT_LE(defects(z).lpNorm<Eigen::Infinity>(), 1e-7);
  return total_cost(z);
}

TEST(Solve, PendulumSwingUpMatchesDirectTranscription) {
  const auto ocp = pendulum_ocp(50, 3.0);
  Eigen::VectorXd x0(2);
  x0 << M_PI, 0.0;
  SolverSettings settings;
  settings.max_iterations = 200;
  settings.cost_decrease_tolerance = 1e-10;
  const auto result = solve(ocp, x0, settings);
  EXPECT_TRUE(result.converged);
  // Swing-up must actually reach the upright.
  EXPECT_LE(std::abs(result.trajectory.states.back()[0]), 0.15);

  const double oracle_cost = direct_transcription_cost(ocp, x0);
  EXPECT_NEAR(result.cost, oracle_cost, 0.01 * oracle_cost);
}

TEST(Solve, MeritMonotoneAcrossAcceptedIterations) {
  const auto ocp = pendulum_ocp(50, 3.0);
  Eigen::VectorXd x0(2);
  x0 << M_PI, 0.0;
  SolverSettings settings;
  settings.max_iterations = 200;
  const auto result = solve(ocp, x0, settings);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& record : result.iterations) {
    if (record.step_size > 0.0) {
      EXPECT_LT(record.merit, previous);
      previous = record.merit;
    }
  }
}

TEST(Solve, DeterministicIterationLogs) {
  const auto ocp = pendulum_ocp(50, 3.0);
  Eigen::VectorXd x0(2);
  x0 << M_PI, 0.0;
  SolverSettings settings;
  settings.max_iterations = 100;
  const auto a = solve(ocp, x0, settings);
  const auto b = solve(ocp, x0, settings);
  EXPECT_EQ(iteration_log_csv(a.iterations), iteration_log_csv(b.iterations));
}

TEST(MpcStep, RepeatedStepsReachFullSolve) {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.0, 1.0, -1.0, -0.4;
  B << 0.0, 1.0;
  const auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(2, 2),
                           Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(2, 2), 2.0, 40);
  Eigen::VectorXd x0(2);
  x0 << 1.0, -0.5;
  SolverSettings settings;
  const auto reference = solve(ocp, x0, settings);

  // Crude warm start: zero inputs.
  SolveResult incremental;
  Eigen::VectorXd times(41);
  for (int k = 0; k <= 40; ++k) times[k] = ocp.node_time(k);
  incremental.trajectory = rollout(
      ocp, x0,
      FeedbackPolicy::open_loop(
          times, std::vector<Eigen::VectorXd>(40, Eigen::VectorXd::Zero(1)), 2));
  incremental.policy = FeedbackPolicy::open_loop(
      times, incremental.trajectory.inputs, 2);
  incremental.policy.nominal_states = incremental.trajectory.states;

  for (int step = 0; step < 10; ++step) {
    incremental = mpc_step(ocp, x0, incremental, settings);
  }
  EXPECT_NEAR(incremental.cost, reference.cost, 1e-6 * (1.0 + reference.cost));
}

TEST(MpcStep, OptimalWarmStartIsNoOp) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << -0.5;
  B << 1.0;
  const auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Identity(1, 1),
                           Eigen::MatrixXd::Zero(1, 1), 1.0, 20);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  SolverSettings settings;
  settings.cost_decrease_tolerance = 1e-14;
  settings.max_iterations = 100;
  const auto reference = solve(ocp, x0, settings);
  const auto stepped = mpc_step(ocp, x0, reference, settings);
  EXPECT_DOUBLE_EQ(stepped.iterations[0].step_size, 0.0);
  for (size_t k = 0; k < reference.trajectory.inputs.size(); ++k) {
    EXPECT_EQ(stepped.trajectory.inputs[k], reference.trajectory.inputs[k]);
  }
}

TEST(MpcStep, ConstraintScheduleKeepsAbsoluteTimes) {
  // The input must track a time-keyed equality constraint; after shifting the
  // horizon the switch stays at the same absolute time.
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << 0.0;
  B << 1.0;
  auto make_ocp = [&](double t0) {
    auto ocp = lti_ocp(A, B, Eigen::MatrixXd::Identity(1, 1),
                       Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1),
                       1.0, 50);
    ocp.start_time = t0;
    ocp.equality_constraints = [](const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                  double t) {
      Eigen::VectorXd g(1);
      g << u[0] - (t < 0.55 ? 1.0 : -1.0);
      return g;
    };
    return ocp;
  };

  Eigen::VectorXd x0(1);
  x0 << 0.0;
  SolverSettings settings;
  settings.max_iterations = 20;
  const auto first = solve(make_ocp(0.0), x0, settings);

  const auto shifted_ocp = make_ocp(0.1);
  const auto second = mpc_step(shifted_ocp, x0, first, settings);
  for (int k = 0; k < 50; ++k) {
    const double t = second.trajectory.times[k];
    const double expected = t < 0.55 ? 1.0 : -1.0;
    EXPECT_NEAR(second.trajectory.inputs[k][0], expected, 1e-6) << "t=" << t;
  }
}

TEST(IterationLog, CsvSchema) {
  std::vector<IterationRecord> records(1);
  records[0].iteration = 1;
  const std::string csv = iteration_log_csv(records);
  EXPECT_NE(csv.find("iteration,cost,merit,step_size,constraint_violation"),
            std::string::npos);
}

}  // namespace
}  // namespace fsmpc
