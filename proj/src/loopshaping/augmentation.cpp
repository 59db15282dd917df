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

#include "fsmpc/loopshaping/augmentation.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {

Eigen::VectorXd AugmentedOcp::lift_state(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& x_s) const {
  if (x.size() != original_state_dim || x_s.size() != filter_state_dim()) {
    throw std::invalid_argument("lift_state: dimension mismatch");
  }
  Eigen::VectorXd z(x.size() + x_s.size());
  z << x, x_s;
  return z;
}

Eigen::VectorXd AugmentedOcp::original_state(const Eigen::VectorXd& z) const {
  return z.head(original_state_dim);
}

Eigen::VectorXd AugmentedOcp::filter_state(const Eigen::VectorXd& z) const {
  return z.tail(filter_state_dim());
}

Eigen::VectorXd AugmentedOcp::recovered_input(const Eigen::VectorXd& z,
                                              const Eigen::VectorXd& nu) const {
  return recover_input(bank, filter_state(z), nu);
}

Eigen::VectorXd AugmentedOcp::steady_filter_state(const Eigen::VectorXd& u) const {
  Eigen::VectorXd x_s(filter_state_dim());
  for (int j = 0; j < filter_state_dim(); ++j) {
    const double a = bank.A_s(j, j);
    if (a == 0.0) {
      throw std::invalid_argument(
          "steady_filter_state: integrator filter block has no steady state");
    }
    const int i = bank.state_to_input[j];
    x_s[j] = -bank.B_s(j, i) / a * u[i];
  }
  return x_s;
}

AugmentedOcp augment_ocp(const OcpDefinition& ocp, const ShapingSpec& spec) {
  ocp.validate();
  spec.validate();
  if (spec.input_dim() != ocp.input_dim) {
    throw std::invalid_argument(
        "augment_ocp: spec length must equal the input dimension");
  }

  AugmentedOcp augmented;
  augmented.bank = make_filter_bank(spec);
  augmented.original_state_dim = ocp.state_dim;
  augmented.original_input_dim = ocp.input_dim;

  const FilterBank bank = augmented.bank;
  const int n = ocp.state_dim;
  const int m = ocp.input_dim;
  const int n_s = bank.state_dim();

  OcpDefinition& aug = augmented.problem;
  aug.state_dim = n + n_s;
  aug.input_dim = m;
  aug.start_time = ocp.start_time;
  aug.horizon = ocp.horizon;
  aug.nodes = ocp.nodes;

  auto recover = [bank, n, n_s](const Eigen::VectorXd& z, const Eigen::VectorXd& nu) {
    return recover_input(bank, z.tail(n_s), nu);
  };

  aug.dynamics = [ocp_dyn = ocp.dynamics, bank, recover, n, n_s](
                     const Eigen::VectorXd& z, const Eigen::VectorXd& nu, double t) {
    Eigen::VectorXd dz(n + n_s);
    dz.head(n) = ocp_dyn(z.head(n), recover(z, nu), t);
    if (n_s > 0) {
      dz.tail(n_s) = bank.A_s * z.tail(n_s) + bank.B_s * nu;
    }
    return dz;
  };
  if (ocp.dynamics_jacobian) {
    aug.dynamics_jacobian = [jac = ocp.dynamics_jacobian, bank, recover, n, n_s, m](
                                const Eigen::VectorXd& z, const Eigen::VectorXd& nu,
                                double t, Eigen::MatrixXd& dfdz,
                                Eigen::MatrixXd& dfdnu) {
      Eigen::MatrixXd dfdx, dfdu;
      jac(z.head(n), recover(z, nu), t, dfdx, dfdu);
      dfdz.setZero(n + n_s, n + n_s);
      dfdnu.setZero(n + n_s, m);
      dfdz.topLeftCorner(n, n) = dfdx;
      dfdnu.topRows(n) = dfdu * bank.D_s;
      if (n_s > 0) {
        dfdz.topRightCorner(n, n_s) = dfdu * bank.C_s;
        dfdz.bottomRightCorner(n_s, n_s) = bank.A_s;
        dfdnu.bottomRows(n_s) = bank.B_s;
      }
    };
  }

  aug.state_cost = [cost = ocp.state_cost, n](const Eigen::VectorXd& z, double t) {
    return cost(z.head(n), t);
  };
  if (ocp.state_cost_expansion) {
    aug.state_cost_expansion = [exp = ocp.state_cost_expansion, n, n_s](
                                   const Eigen::VectorXd& z, double t,
                                   Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
      Eigen::VectorXd g;
      Eigen::MatrixXd H;
      exp(z.head(n), t, g, H);
      grad.setZero(n + n_s);
      hess.setZero(n + n_s, n + n_s);
      grad.head(n) = g;
      hess.topLeftCorner(n, n) = H;
    };
  }

  // The input cost keeps the original weighting, evaluated on nu; the filter
  // has unit DC gain so the steady-state offset carries over unchanged.
  aug.input_cost = ocp.input_cost;
  aug.input_cost_expansion = ocp.input_cost_expansion;

  if (ocp.terminal_cost) {
    aug.terminal_cost = [cost = ocp.terminal_cost, n](const Eigen::VectorXd& z) {
      return cost(z.head(n));
    };
  }
  if (ocp.terminal_cost_expansion) {
    aug.terminal_cost_expansion = [exp = ocp.terminal_cost_expansion, n, n_s](
                                      const Eigen::VectorXd& z, Eigen::VectorXd& grad,
                                      Eigen::MatrixXd& hess) {
      Eigen::VectorXd g;
      Eigen::MatrixXd H;
      exp(z.head(n), g, H);
      grad.setZero(n + n_s);
      hess.setZero(n + n_s, n + n_s);
      grad.head(n) = g;
      hess.topLeftCorner(n, n) = H;
    };
  }

  if (ocp.equality_constraints) {
    aug.equality_constraints = [con = ocp.equality_constraints, recover, n](
                                   const Eigen::VectorXd& z, const Eigen::VectorXd& nu,
                                   double t) {
      return con(z.head(n), recover(z, nu), t);
    };
    if (ocp.equality_constraint_jacobian) {
      aug.equality_constraint_jacobian =
          [jac = ocp.equality_constraint_jacobian, bank, recover, n, n_s, m](
              const Eigen::VectorXd& z, const Eigen::VectorXd& nu, double t,
              Eigen::MatrixXd& dgdz, Eigen::MatrixXd& dgdnu) {
            Eigen::MatrixXd dgdx, dgdu;
            jac(z.head(n), recover(z, nu), t, dgdx, dgdu);
            const auto rows = dgdx.rows();
            dgdz.resize(rows, n + n_s);
            dgdz.leftCols(n) = dgdx;
            if (n_s > 0) {
              dgdz.rightCols(n_s) = dgdu * bank.C_s;
            }
            dgdnu = dgdu * bank.D_s;
          };
    }
  }

  if (ocp.input_projection) {
    // Project the recovered input and push the correction back through the
    // direct term. Requires an invertible D_s (alpha > 0 on shaped inputs).
    for (int i = 0; i < m; ++i) {
      if (bank.D_s(i, i) == 0.0) {
        if (spec.inputs[i].is_shaped()) {
          throw UnsupportedStructureError(
              "augment_ocp: input projection requires alpha > 0 on shaped inputs");
        }
      }
    }
    aug.input_projection = [proj = ocp.input_projection, bank, recover, n](
                               const Eigen::VectorXd& z, const Eigen::VectorXd& nu,
                               double t) {
      const Eigen::VectorXd u = recover(z, nu);
      const Eigen::VectorXd u_projected = proj(z.head(n), u, t);
      if (u_projected == u) {
        return nu;
      }
      Eigen::VectorXd nu_projected = nu;
      for (int i = 0; i < nu.size(); ++i) {
        nu_projected[i] += (u_projected[i] - u[i]) / bank.D_s(i, i);
      }
      return nu_projected;
    };
  }

  aug.initial_input = ocp.initial_input;
  return augmented;
}

AugmentedOcp derivative_augmentation(const OcpDefinition& ocp,
                                     double constraint_penalty) {
  ocp.validate();
  const int n = ocp.state_dim;
  const int m = ocp.input_dim;

  AugmentedOcp augmented;
  augmented.original_state_dim = n;
  augmented.original_input_dim = m;

  // r(w) = jw for every input: s = 1/r is an integrator bank, u = x_s.
  FilterBank& bank = augmented.bank;
  bank.A_s = Eigen::MatrixXd::Zero(m, m);
  bank.B_s = Eigen::MatrixXd::Identity(m, m);
  bank.C_s = Eigen::MatrixXd::Identity(m, m);
  bank.D_s = Eigen::MatrixXd::Zero(m, m);
  bank.state_to_input.resize(m);
  for (int i = 0; i < m; ++i) {
    bank.state_to_input[i] = i;
  }

  OcpDefinition& aug = augmented.problem;
  aug.state_dim = n + m;
  aug.input_dim = m;
  aug.start_time = ocp.start_time;
  aug.horizon = ocp.horizon;
  aug.nodes = ocp.nodes;

  aug.dynamics = [dyn = ocp.dynamics, n, m](const Eigen::VectorXd& z,
                                            const Eigen::VectorXd& nu, double t) {
    Eigen::VectorXd dz(n + m);
    dz.head(n) = dyn(z.head(n), z.tail(m), t);
    dz.tail(m) = nu;
    return dz;
  };
  if (ocp.dynamics_jacobian) {
    aug.dynamics_jacobian = [jac = ocp.dynamics_jacobian, n, m](
                                const Eigen::VectorXd& z, const Eigen::VectorXd& nu,
                                double t, Eigen::MatrixXd& dfdz,
                                Eigen::MatrixXd& dfdnu) {
      (void)nu;
      Eigen::MatrixXd dfdx, dfdu;
      jac(z.head(n), z.tail(m), t, dfdx, dfdu);
      dfdz.setZero(n + m, n + m);
      dfdz.topLeftCorner(n, n) = dfdx;
      dfdz.topRightCorner(n, m) = dfdu;
      dfdnu.setZero(n + m, m);
      dfdnu.bottomRows(m).setIdentity();
    };
  }

  // The former input u is now part of the state; its running cost and any
  // state-input constraints (as a quadratic penalty) move into the state cost.
  aug.state_cost = [state_cost = ocp.state_cost, input_cost = ocp.input_cost,
                    constraints = ocp.equality_constraints, constraint_penalty, n,
                    m](const Eigen::VectorXd& z, double t) {
    double value = state_cost(z.head(n), t) + input_cost(z.tail(m), t);
    if (constraints) {
      const Eigen::VectorXd g = constraints(z.head(n), z.tail(m), t);
      value += 0.5 * constraint_penalty * g.squaredNorm();
    }
    return value;
  };

  // Cost on the auxiliary input: reuse the curvature of the original input
  // cost (its Hessian at the warm-start input), centered at zero rate.
  Eigen::VectorXd u_ref = ocp.initial_input ? ocp.initial_input(ocp.start_time)
                                            : Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd R_rate(m, m);
  if (ocp.input_cost_expansion) {
    Eigen::VectorXd g;
    ocp.input_cost_expansion(u_ref, ocp.start_time, g, R_rate);
  } else {
    R_rate = Eigen::MatrixXd::Identity(m, m);
  }
  aug.input_cost = [R_rate](const Eigen::VectorXd& nu, double /*t*/) {
    return 0.5 * nu.dot(R_rate * nu);
  };
  aug.input_cost_expansion = [R_rate](const Eigen::VectorXd& nu, double /*t*/,
                                      Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    grad = R_rate * nu;
    hess = R_rate;
  };

  if (ocp.terminal_cost) {
    aug.terminal_cost = [cost = ocp.terminal_cost, n](const Eigen::VectorXd& z) {
      return cost(z.head(n));
    };
  }
  aug.initial_input = [m](double /*t*/) { return Eigen::VectorXd::Zero(m); };
  return augmented;
}

}  // namespace fsmpc
