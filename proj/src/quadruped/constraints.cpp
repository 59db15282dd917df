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

#include "fsmpc/quadruped/constraints.hpp"

#include <cmath>

namespace fsmpc {

int mode_constraint_rows(const GaitSchedule& gait, double t) {
  int rows = 0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    rows += mode_at(gait, t, leg).stance ? 3 : 4;
  }
  return rows;
}

Eigen::VectorXd mode_constraints(const RobotParams& params,
                                 const GaitSchedule& gait,
                                 const SwingProfile& profile,
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, double t) {
  Eigen::VectorXd residual(mode_constraint_rows(gait, t));
  int row = 0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const LegMode mode = mode_at(gait, t, leg);
    const Eigen::Vector3d velocity = foot_velocity(params, x, u, leg);
    if (mode.stance) {
      residual.segment<3>(row) = velocity;
      row += 3;
    } else {
      const SwingReference reference = swing_reference(profile, mode.phase_in_mode);
      residual[row++] =
          velocity.dot(gait.surface_normal) - reference.normal_velocity;
      residual.segment<3>(row) = u.segment<3>(kForceIdx + 3 * leg);
      row += 3;
    }
  }
  return residual;
}

Eigen::Vector3d project_to_friction_cone(const Eigen::Vector3d& force,
                                         const Eigen::Vector3d& normal, double mu) {
  const double normal_component = force.dot(normal);
  const Eigen::Vector3d tangential = force - normal_component * normal;
  const double tangential_norm = tangential.norm();
  if (tangential_norm <= mu * normal_component) {
    return force;  // inside the cone
  }
  if (mu * tangential_norm <= -normal_component) {
    return Eigen::Vector3d::Zero();  // polar cone: nearest point is the apex
  }
  const double projected_normal =
      (normal_component + mu * tangential_norm) / (1.0 + mu * mu);
  return projected_normal * normal +
         (mu * projected_normal / tangential_norm) * tangential;
}

Eigen::VectorXd clamp_stance_forces(const GaitSchedule& gait,
                                    const Eigen::VectorXd& u, double t) {
  Eigen::VectorXd clamped = u;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (mode_at(gait, t, leg).stance) {
      clamped.segment<3>(kForceIdx + 3 * leg) = project_to_friction_cone(
          u.segment<3>(kForceIdx + 3 * leg), gait.surface_normal,
          gait.friction_coefficient);
    }
  }
  return clamped;
}

}  // namespace fsmpc
