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

#include "fsmpc/loopshaping/filter_bank.hpp"

#include <cmath>
#include <stdexcept>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {

RationalTransferFunction make_r_filter(const ShapingSpec& spec, int input_index) {
  spec.validate();
  const auto& shaping = spec.inputs.at(input_index);
  if (!shaping.is_shaped()) {
    return RationalTransferFunction::identity();
  }
  Eigen::VectorXd num(2), den(2);
  num << 1.0, shaping.beta;
  den << 1.0, shaping.alpha;  // alpha == 0 trims to the constant 1
  return RationalTransferFunction(num, den);
}

FilterBank make_filter_bank(const ShapingSpec& spec) {
  spec.validate();
  const int m = spec.input_dim();
  const int n_s = spec.shaped_count();

  FilterBank bank;
  bank.A_s = Eigen::MatrixXd::Zero(n_s, n_s);
  bank.B_s = Eigen::MatrixXd::Zero(n_s, m);
  bank.C_s = Eigen::MatrixXd::Zero(m, n_s);
  bank.D_s = Eigen::MatrixXd::Identity(m, m);

  int state = 0;
  for (int i = 0; i < m; ++i) {
    if (!spec.inputs[i].is_shaped()) {
      continue;
    }
    // Inverse shaping function s_i = (1 + alpha jw)/(1 + beta jw).
    Eigen::VectorXd num(2), den(2);
    num << 1.0, spec.inputs[i].alpha;
    den << 1.0, spec.inputs[i].beta;
    const auto block = balanced_first_order(RationalTransferFunction(num, den));
    bank.A_s(state, state) = block.A(0, 0);
    bank.B_s(state, i) = block.B(0, 0);
    bank.C_s(i, state) = block.C(0, 0);
    bank.D_s(i, i) = block.D(0, 0);
    bank.state_to_input.push_back(i);
    ++state;
  }
  return bank;
}

Eigen::VectorXd recover_input(const FilterBank& bank, const Eigen::VectorXd& x_s,
                              const Eigen::VectorXd& nu) {
  if (x_s.size() != bank.state_dim() || nu.size() != bank.input_dim()) {
    throw std::invalid_argument("recover_input: dimension mismatch");
  }
  if (bank.is_identity()) {
    return bank.D_s * nu;
  }
  return bank.C_s * x_s + bank.D_s * nu;
}

const Eigen::VectorXd& AuxiliaryInputPlan::sample(double t) const {
  if (times.size() == 0 || values.empty()) {
    throw PlanExpiredError("auxiliary input plan is empty");
  }
  if (t < times[0] - 1e-12) {
    throw PlanExpiredError("auxiliary input plan starts after requested time");
  }
  int index = 0;
  while (index + 1 < static_cast<int>(values.size()) && times[index + 1] <= t) {
    ++index;
  }
  return values[index];
}

Eigen::VectorXd propagate_filter_state(const FilterBank& bank,
                                       const Eigen::VectorXd& x_s,
                                       const AuxiliaryInputPlan& plan, double t0,
                                       double dt) {
  if (dt <= 0.0) {
    throw std::invalid_argument("propagate_filter_state: dt must be positive");
  }
  if (bank.is_identity()) {
    return x_s;  // no filter state
  }
  if (x_s.size() != bank.state_dim()) {
    throw std::invalid_argument("propagate_filter_state: state dimension mismatch");
  }

  Eigen::VectorXd state = x_s;
  double t = t0;
  const double t_end = t0 + dt;
  while (t < t_end - 1e-12) {
    // Advance to the next plan node or the end of the interval.
    const Eigen::VectorXd& nu = plan.sample(t);
    double t_next = t_end;
    for (int k = 0; k < plan.times.size(); ++k) {
      if (plan.times[k] > t + 1e-12) {
        t_next = std::min(t_next, plan.times[k]);
        break;
      }
    }
    const double h = t_next - t;
    for (int j = 0; j < bank.state_dim(); ++j) {
      const int i = bank.state_to_input[j];
      const double a = bank.A_s(j, j);
      const double b = bank.B_s(j, i);
      const double decay = std::exp(a * h);
      // Exact zero-order-hold step of x' = a x + b nu_i.
      state[j] = decay * state[j] + (decay - 1.0) / a * b * nu[i];
    }
    t = t_next;
  }
  return state;
}

}  // namespace fsmpc
