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

#include "fsmpc/quadruped/model.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace fsmpc {
namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

void check_chart(const Eigen::Vector3d& euler) {
  if (!euler.allFinite() || std::abs(euler[1]) >= M_PI / 2.0 - 1e-3) {
    throw ChartError("euler chart: pitch too close to +-pi/2");
  }
}

}  // namespace

RobotParams RobotParams::defaults() {
  RobotParams params;
  params.hip_offsets = {Eigen::Vector3d(0.34, 0.19, 0.0),
                        Eigen::Vector3d(0.34, -0.19, 0.0),
                        Eigen::Vector3d(-0.34, 0.19, 0.0),
                        Eigen::Vector3d(-0.34, -0.19, 0.0)};

  // Two-link IK placing each foot directly below its hip at stance height:
  // front legs bend the knee backward, hind legs mirror.
  const double d = params.stance_height;
  const double lt = params.thigh_length;
  const double ls = params.shank_length;
  const double cos_hfe = (lt * lt + d * d - ls * ls) / (2.0 * d * lt);
  const double hfe = std::acos(cos_hfe);
  const double cos_w = (d - lt * cos_hfe) / ls;
  const double w = std::acos(cos_w);

  params.default_joints.resize(12);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const bool front = leg < 2;
    const double q2 = front ? hfe : -hfe;
    const double q3 = front ? (-w - q2) : (w - q2);
    params.default_joints.segment<3>(3 * leg) << 0.0, q2, q3;
  }
  return params;
}

Eigen::Matrix3d rotation_world_base(const Eigen::Vector3d& euler) {
  const double cr = std::cos(euler[0]), sr = std::sin(euler[0]);
  const double cp = std::cos(euler[1]), sp = std::sin(euler[1]);
  const double cy = std::cos(euler[2]), sy = std::sin(euler[2]);
  Eigen::Matrix3d r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,  //
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,   //
      -sp, cp * sr, cp * cr;
  return r;
}

std::array<Eigen::Matrix3d, 3> rotation_world_base_derivatives(
    const Eigen::Vector3d& euler) {
  const double cr = std::cos(euler[0]), sr = std::sin(euler[0]);
  const double cp = std::cos(euler[1]), sp = std::sin(euler[1]);
  const double cy = std::cos(euler[2]), sy = std::sin(euler[2]);
  std::array<Eigen::Matrix3d, 3> d;
  // d/d roll
  d[0] << 0.0, cy * sp * cr + sy * sr, -cy * sp * sr + sy * cr,  //
      0.0, sy * sp * cr - cy * sr, -sy * sp * sr - cy * cr,      //
      0.0, cp * cr, -cp * sr;
  // d/d pitch
  d[1] << -cy * sp, cy * cp * sr, cy * cp * cr,  //
      -sy * sp, sy * cp * sr, sy * cp * cr,      //
      -cp, -sp * sr, -sp * cr;
  // d/d yaw
  d[2] << -sy * cp, -sy * sp * sr - cy * cr, -sy * sp * cr + cy * sr,  //
      cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,         //
      0.0, 0.0, 0.0;
  return d;
}

Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& euler) {
  check_chart(euler);
  const double cr = std::cos(euler[0]), sr = std::sin(euler[0]);
  const double cp = std::cos(euler[1]), tp = std::tan(euler[1]);
  Eigen::Matrix3d t;
  t << 1.0, sr * tp, cr * tp,  //
      0.0, cr, -sr,            //
      0.0, sr / cp, cr / cp;
  return t;
}

std::array<Eigen::Matrix3d, 2> euler_rate_matrix_derivatives(
    const Eigen::Vector3d& euler) {
  check_chart(euler);
  const double cr = std::cos(euler[0]), sr = std::sin(euler[0]);
  const double cp = std::cos(euler[1]), sp = std::sin(euler[1]);
  const double tp = sp / cp;
  std::array<Eigen::Matrix3d, 2> d;
  // d/d roll
  d[0] << 0.0, cr * tp, -sr * tp,  //
      0.0, -sr, -cr,               //
      0.0, cr / cp, -sr / cp;
  // d/d pitch
  const double sec2 = 1.0 / (cp * cp);
  d[1] << 0.0, sr * sec2, cr * sec2,  //
      0.0, 0.0, 0.0,                  //
      0.0, sr * sp * sec2, cr * sp * sec2;
  return d;
}

Eigen::Vector3d foot_position_body(const RobotParams& params,
                                   const Eigen::Vector3d& leg_joints, int leg) {
  const double d = RobotParams::lateral_sign(leg) * params.hip_length;
  const double s2 = std::sin(leg_joints[1]), c2 = std::cos(leg_joints[1]);
  const double s23 = std::sin(leg_joints[1] + leg_joints[2]);
  const double c23 = std::cos(leg_joints[1] + leg_joints[2]);
  const Eigen::Vector3d inner(-params.thigh_length * s2 - params.shank_length * s23,
                              d,
                              -params.thigh_length * c2 - params.shank_length * c23);
  const double c1 = std::cos(leg_joints[0]), s1 = std::sin(leg_joints[0]);
  Eigen::Vector3d rotated(inner.x(), c1 * inner.y() - s1 * inner.z(),
                          s1 * inner.y() + c1 * inner.z());
  return params.hip_offsets[leg] + rotated;
}

Eigen::Matrix3d leg_jacobian(const RobotParams& params,
                             const Eigen::Vector3d& leg_joints, int leg) {
  const double lt = params.thigh_length, ls = params.shank_length;
  const double s2 = std::sin(leg_joints[1]), c2 = std::cos(leg_joints[1]);
  const double s23 = std::sin(leg_joints[1] + leg_joints[2]);
  const double c23 = std::cos(leg_joints[1] + leg_joints[2]);
  const double c1 = std::cos(leg_joints[0]), s1 = std::sin(leg_joints[0]);

  const Eigen::Vector3d relative =
      foot_position_body(params, leg_joints, leg) - params.hip_offsets[leg];

  Eigen::Matrix3d jacobian;
  // HAA rotates the whole leg about the body x axis through the hip.
  jacobian.col(0) = Eigen::Vector3d::UnitX().cross(relative);
  // HFE and KFE act about the (HAA-rotated) y axis.
  const Eigen::Vector3d col2_local(-lt * c2 - ls * c23, 0.0, lt * s2 + ls * s23);
  const Eigen::Vector3d col3_local(-ls * c23, 0.0, ls * s23);
  jacobian.col(1) = Eigen::Vector3d(col2_local.x(), -s1 * col2_local.z(),
                                    c1 * col2_local.z());
  jacobian.col(2) = Eigen::Vector3d(col3_local.x(), -s1 * col3_local.z(),
                                    c1 * col3_local.z());
  return jacobian;
}

double leg_jacobian_condition(const Eigen::Matrix3d& jacobian) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(jacobian);
  const auto& sigma = svd.singularValues();
  if (sigma[2] <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sigma[0] / sigma[2];
}

std::array<Eigen::Vector3d, kNumLegs> forward_kinematics(const RobotParams& params,
                                                         const Eigen::VectorXd& x) {
  const Eigen::Matrix3d r = rotation_world_base(x.segment<3>(kEulerIdx));
  const Eigen::Vector3d p = x.segment<3>(kPositionIdx);
  std::array<Eigen::Vector3d, kNumLegs> feet;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    feet[leg] =
        p + r * foot_position_body(params, x.segment<3>(kJointIdx + 3 * leg), leg);
  }
  return feet;
}

Eigen::Vector3d foot_velocity(const RobotParams& params, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, int leg) {
  const Eigen::Vector3d euler = x.segment<3>(kEulerIdx);
  check_chart(euler);
  const Eigen::Matrix3d r = rotation_world_base(euler);
  const Eigen::Vector3d omega = x.segment<3>(kAngularRateIdx);
  const Eigen::Vector3d v = x.segment<3>(kVelocityIdx);
  const Eigen::Vector3d leg_joints = x.segment<3>(kJointIdx + 3 * leg);
  const Eigen::Vector3d foot_body = foot_position_body(params, leg_joints, leg);
  const Eigen::Vector3d joint_rates = u.segment<3>(kJointVelocityIdx + 3 * leg);
  return r * (v + omega.cross(foot_body) +
              leg_jacobian(params, leg_joints, leg) * joint_rates);
}

Eigen::VectorXd eom(const RobotParams& params, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& u) {
  const Eigen::Vector3d euler = x.segment<3>(kEulerIdx);
  const Eigen::Matrix3d t = euler_rate_matrix(euler);
  const Eigen::Matrix3d r = rotation_world_base(euler);
  const Eigen::Vector3d omega = x.segment<3>(kAngularRateIdx);
  const Eigen::Vector3d v = x.segment<3>(kVelocityIdx);

  const Eigen::Matrix3d inertia = params.inertia();
  const Eigen::Vector3d gravity_world(0.0, 0.0, -kGravity);

  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
  Eigen::Vector3d force_body = Eigen::Vector3d::Zero();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d force_leg_body =
        r.transpose() * u.segment<3>(kForceIdx + 3 * leg);
    const Eigen::Vector3d foot =
        foot_position_body(params, x.segment<3>(kJointIdx + 3 * leg), leg);
    torque += foot.cross(force_leg_body);
    force_body += force_leg_body;
  }

  Eigen::VectorXd dx(kStateDim);
  dx.segment<3>(kEulerIdx) = t * omega;
  dx.segment<3>(kPositionIdx) = r * v;
  dx.segment<3>(kAngularRateIdx) =
      inertia.inverse() * (-omega.cross(inertia * omega) + torque);
  dx.segment<3>(kVelocityIdx) = r.transpose() * gravity_world + force_body / params.mass;
  dx.segment<12>(kJointIdx) = u.segment<12>(kJointVelocityIdx);
  return dx;
}

void eom_jacobian(const RobotParams& params, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& u, Eigen::MatrixXd& dfdx,
                  Eigen::MatrixXd& dfdu) {
  const Eigen::Vector3d euler = x.segment<3>(kEulerIdx);
  const Eigen::Matrix3d t = euler_rate_matrix(euler);
  const auto dt = euler_rate_matrix_derivatives(euler);
  const Eigen::Matrix3d r = rotation_world_base(euler);
  const auto dr = rotation_world_base_derivatives(euler);
  const Eigen::Vector3d omega = x.segment<3>(kAngularRateIdx);
  const Eigen::Vector3d v = x.segment<3>(kVelocityIdx);
  const Eigen::Matrix3d inertia = params.inertia();
  const Eigen::Matrix3d inertia_inverse = inertia.inverse();
  const Eigen::Vector3d gravity_world(0.0, 0.0, -kGravity);

  dfdx.setZero(kStateDim, kStateDim);
  dfdu.setZero(kStateDim, kInputDim);

  // Euler rates.
  dfdx.block<3, 1>(kEulerIdx, 0) = dt[0] * omega;
  dfdx.block<3, 1>(kEulerIdx, 1) = dt[1] * omega;
  dfdx.block<3, 3>(kEulerIdx, kAngularRateIdx) = t;

  // CoM position.
  for (int j = 0; j < 3; ++j) {
    dfdx.block<3, 1>(kPositionIdx, j) = dr[j] * v;
  }
  dfdx.block<3, 3>(kPositionIdx, kVelocityIdx) = r;

  // Force resultant: total world force including gravity, per unit mass.
  Eigen::Vector3d total_force_world = params.mass * gravity_world;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    total_force_world += u.segment<3>(kForceIdx + 3 * leg);
  }

  // Angular rate.
  dfdx.block<3, 3>(kAngularRateIdx, kAngularRateIdx) =
      inertia_inverse * (skew(inertia * omega) - skew(omega) * inertia);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d force_world = u.segment<3>(kForceIdx + 3 * leg);
    const Eigen::Vector3d force_body = r.transpose() * force_world;
    const Eigen::Vector3d leg_joints = x.segment<3>(kJointIdx + 3 * leg);
    const Eigen::Vector3d foot = foot_position_body(params, leg_joints, leg);
    const Eigen::Matrix3d jacobian = leg_jacobian(params, leg_joints, leg);

    for (int j = 0; j < 3; ++j) {
      dfdx.block<3, 1>(kAngularRateIdx, j) +=
          inertia_inverse * foot.cross(dr[j].transpose() * force_world);
    }
    dfdx.block<3, 3>(kAngularRateIdx, kJointIdx + 3 * leg) =
        inertia_inverse * (-skew(force_body)) * jacobian;
    dfdu.block<3, 3>(kAngularRateIdx, kForceIdx + 3 * leg) =
        inertia_inverse * skew(foot) * r.transpose();
    dfdu.block<3, 3>(kVelocityIdx, kForceIdx + 3 * leg) =
        r.transpose() / params.mass;
  }

  // Linear velocity.
  for (int j = 0; j < 3; ++j) {
    dfdx.block<3, 1>(kVelocityIdx, j) =
        dr[j].transpose() * total_force_world / params.mass;
  }

  // Joints.
  dfdu.block<12, 12>(kJointIdx, kJointVelocityIdx).setIdentity();
}

}  // namespace fsmpc
