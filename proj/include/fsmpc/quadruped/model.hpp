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

#include <array>
#include <stdexcept>

#include <Eigen/Core>

#include "fsmpc/common/errors.hpp"

namespace fsmpc {

// Kinodynamic quadruped: single rigid body plus three-joint kinematic legs.
// State layout (24): Euler angles (roll, pitch, yaw), CoM position (world),
// angular rate (body), CoM linear velocity (body), 12 joint positions.
// Input layout (24): four world-frame contact forces, 12 joint velocities.
inline constexpr int kNumLegs = 4;
inline constexpr int kStateDim = 24;
inline constexpr int kInputDim = 24;
inline constexpr int kEulerIdx = 0;
inline constexpr int kPositionIdx = 3;
inline constexpr int kAngularRateIdx = 6;
inline constexpr int kVelocityIdx = 9;
inline constexpr int kJointIdx = 12;
inline constexpr int kForceIdx = 0;
inline constexpr int kJointVelocityIdx = 12;

// Leg order: left-front, right-front, left-hind, right-hind.
enum Leg { kLeftFront = 0, kRightFront = 1, kLeftHind = 2, kRightHind = 3 };

/// The base Euler chart excludes |pitch| >= pi/2 - 1e-3.
class ChartError : public DivergenceError {
 public:
  explicit ChartError(const std::string& what) : DivergenceError(what, -1) {}
};

struct RobotParams {
  double mass = 30.0;                   // kg
  Eigen::Vector3d inertia_diagonal{0.88, 1.85, 1.97};  // kg m^2, body frame
  std::array<Eigen::Vector3d, kNumLegs> hip_offsets;   // from CoM, body frame
  double hip_length = 0.11;    // lateral offset along the HAA axis link
  double thigh_length = 0.25;
  double shank_length = 0.33;
  double stance_height = 0.45;  // default CoM height above flat ground
  Eigen::VectorXd default_joints;  // 12, from the stance-height IK

  /// ANYmal-like configuration defaults; default_joints are solved so each
  /// foot sits directly below its hip at stance_height.
  static RobotParams defaults();

  /// Lateral HAA link sign: +1 for left legs, -1 for right legs.
  static double lateral_sign(int leg) { return (leg == 0 || leg == 2) ? 1.0 : -1.0; }

  Eigen::Matrix3d inertia() const { return inertia_diagonal.asDiagonal(); }
};

// --- Base kinematics --------------------------------------------------------

/// World-from-body rotation for Z-Y-X yaw-pitch-roll angles (roll, pitch, yaw).
Eigen::Matrix3d rotation_world_base(const Eigen::Vector3d& euler);

/// Partial derivatives of the rotation with respect to each Euler angle.
std::array<Eigen::Matrix3d, 3> rotation_world_base_derivatives(
    const Eigen::Vector3d& euler);

/// Maps body angular velocity to Euler-angle rates. Throws ChartError near
/// the pitch singularity.
Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& euler);

/// Partial derivatives of euler_rate_matrix with respect to roll and pitch
/// (the yaw derivative vanishes).
std::array<Eigen::Matrix3d, 2> euler_rate_matrix_derivatives(
    const Eigen::Vector3d& euler);

// --- Leg kinematics ---------------------------------------------------------

/// Foot position relative to the CoM, body frame.
Eigen::Vector3d foot_position_body(const RobotParams& params,
                                   const Eigen::Vector3d& leg_joints, int leg);

/// 3x3 body-frame Jacobian of foot_position_body with respect to the leg's
/// joints.
Eigen::Matrix3d leg_jacobian(const RobotParams& params,
                             const Eigen::Vector3d& leg_joints, int leg);

/// sigma_max / sigma_min of the leg Jacobian; a stretched leg loses rank.
double leg_jacobian_condition(const Eigen::Matrix3d& jacobian);
inline bool leg_near_singular(const Eigen::Matrix3d& jacobian) {
  return leg_jacobian_condition(jacobian) > 1e6;
}

/// World-frame positions of all four feet for a full state.
std::array<Eigen::Vector3d, kNumLegs> forward_kinematics(const RobotParams& params,
                                                         const Eigen::VectorXd& x);

/// World-frame velocity of one foot under the current state and input.
Eigen::Vector3d foot_velocity(const RobotParams& params, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, int leg);

// --- Dynamics ---------------------------------------------------------------

/// Kinodynamic equations of motion. Contact forces are world frame and are
/// rotated into the body frame internally.
Eigen::VectorXd eom(const RobotParams& params, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& u);

/// Analytic Jacobians of eom.
void eom_jacobian(const RobotParams& params, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& u, Eigen::MatrixXd& dfdx,
                  Eigen::MatrixXd& dfdu);

inline constexpr double kGravity = 9.81;

}  // namespace fsmpc
