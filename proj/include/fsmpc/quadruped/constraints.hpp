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

#include "fsmpc/quadruped/gait.hpp"
#include "fsmpc/quadruped/model.hpp"

namespace fsmpc {

/// Mode-dependent equality residuals at time t: a stance leg contributes its
/// three foot-velocity rows, a swing leg contributes the normal-velocity
/// tracking row followed by its three zero-force rows. The friction cone of
/// stance legs is handled separately by the rollout projection.
Eigen::VectorXd mode_constraints(const RobotParams& params,
                                 const GaitSchedule& gait,
                                 const SwingProfile& profile,
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, double t);

/// Equality row count at time t: 3 per stance leg + 4 per swing leg.
int mode_constraint_rows(const GaitSchedule& gait, double t);

/// Nearest point of the friction cone C(n_hat, mu): forces in the polar cone
/// project to zero (negative normal components are zeroed), outside forces
/// land on the cone surface.
Eigen::Vector3d project_to_friction_cone(const Eigen::Vector3d& force,
                                         const Eigen::Vector3d& normal, double mu);

/// Rollout projection hook: clamps every stance leg's force to the cone.
Eigen::VectorXd clamp_stance_forces(const GaitSchedule& gait,
                                    const Eigen::VectorXd& u, double t);

}  // namespace fsmpc
