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

#include <Eigen/Core>

#include "fsmpc/quadruped/model.hpp"

namespace fsmpc {

/// Clock-driven periodic gait. A leg is in stance while its wrapped phase is
/// inside the duty window. The default trot pairs LF+RH against RF+LH.
struct GaitSchedule {
  double period = 0.7;      // s
  double duty_factor = 0.5;  // (0, 1]
  std::array<double, kNumLegs> phase_offsets{0.0, 0.5, 0.5, 0.0};
  Eigen::Vector3d surface_normal{0.0, 0.0, 1.0};
  double friction_coefficient = 0.7;

  static GaitSchedule trot(double period = 0.7, double duty = 0.5);
  static GaitSchedule stand();

  double stance_duration() const { return duty_factor * period; }
  double swing_duration() const { return (1.0 - duty_factor) * period; }

  void validate() const;
};

struct LegMode {
  bool stance = true;
  double phase_in_mode = 0.0;  // [0, 1) within the current stance/swing window
};

/// Mode of a leg at absolute time t >= 0.
LegMode mode_at(const GaitSchedule& gait, double t, int leg);

/// Number of stance legs at time t.
int stance_count(const GaitSchedule& gait, double t);

/// Phase-parametrized swing-foot profile along the surface normal: zero
/// lift-off velocity, a configured apex, and a constant touchdown approach
/// velocity that the constraint holds until the next stance window.
struct SwingProfile {
  double apex_height = 0.08;         // m
  double touchdown_velocity = -0.75;  // m/s, negative (toward the ground)
  double duration = 0.35;            // s, swing window length
  double apex_phase = 0.5;

  static SwingProfile make(double apex_height, double touchdown_velocity,
                           double duration);
};

struct SwingReference {
  double normal_velocity = 0.0;  // m/s
  double displacement = 0.0;     // m above the lift-off height
};

/// Evaluates the swing curve; the phase argument is clamped to [0, 1].
SwingReference swing_reference(const SwingProfile& profile, double phase);

}  // namespace fsmpc
