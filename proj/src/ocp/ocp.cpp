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

#include "fsmpc/ocp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsmpc {

void OcpDefinition::validate() const {
  if (state_dim <= 0 || input_dim <= 0) {
    throw std::invalid_argument("ocp: state and input dimensions must be positive");
  }
  if (horizon <= 0.0 || nodes <= 0) {
    throw std::invalid_argument("ocp: horizon and node count must be positive");
  }
  if (!dynamics) {
    throw std::invalid_argument("ocp: dynamics callback missing");
  }
  if (!state_cost || !input_cost) {
    throw std::invalid_argument("ocp: running cost callbacks missing");
  }
}

void SolverSettings::validate() const {
  if (max_iterations <= 0 || cost_decrease_tolerance <= 0.0 ||
      line_search_factor <= 0.0 || line_search_factor >= 1.0 ||
      line_search_steps <= 0 || finite_difference_step <= 0.0 ||
      regularization_initial < 0.0 || regularization_floor < 0.0 ||
      merit_constraint_penalty < 0.0) {
    throw std::invalid_argument("solver settings: values out of range");
  }
}

Eigen::VectorXd Trajectory::state_at(double t) const {
  const int last = static_cast<int>(states.size()) - 1;
  if (t <= times[0]) {
    return states[0];
  }
  if (t >= times[last]) {
    return states[last];
  }
  const double step = dt();
  const int k = std::min(static_cast<int>((t - times[0]) / step), last - 1);
  const double local = (t - times[k]) / step;
  return (1.0 - local) * states[k] + local * states[k + 1];
}

const Eigen::VectorXd& Trajectory::input_at(double t) const {
  const int last = nodes() - 1;
  if (t <= times[0]) {
    return inputs[0];
  }
  const double step = dt();
  const int k = std::min(static_cast<int>((t - times[0]) / step), last);
  return inputs[k];
}

FeedbackPolicy FeedbackPolicy::open_loop(const Eigen::VectorXd& times,
                                         std::vector<Eigen::VectorXd> inputs,
                                         int state_dim) {
  FeedbackPolicy policy;
  policy.times = times;
  const int n_nodes = static_cast<int>(inputs.size());
  const int input_dim = n_nodes > 0 ? static_cast<int>(inputs[0].size()) : 0;
  policy.feedforward = std::move(inputs);
  policy.gains.assign(n_nodes, Eigen::MatrixXd::Zero(input_dim, state_dim));
  policy.nominal_states.assign(n_nodes + 1, Eigen::VectorXd::Zero(state_dim));
  return policy;
}

Eigen::VectorXd FeedbackPolicy::evaluate(int node, const Eigen::VectorXd& x) const {
  return feedforward[node] + gains[node] * (x - nominal_states[node]);
}

}  // namespace fsmpc
