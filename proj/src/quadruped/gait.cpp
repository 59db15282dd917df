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

#include "fsmpc/quadruped/gait.hpp"

#include <cmath>
#include <stdexcept>

namespace fsmpc {

GaitSchedule GaitSchedule::trot(double period, double duty) {
  GaitSchedule gait;
  gait.period = period;
  gait.duty_factor = duty;
  gait.phase_offsets = {0.0, 0.5, 0.5, 0.0};
  return gait;
}

GaitSchedule GaitSchedule::stand() {
  GaitSchedule gait;
  gait.duty_factor = 1.0;
  gait.phase_offsets = {0.0, 0.0, 0.0, 0.0};
  return gait;
}

void GaitSchedule::validate() const {
  if (period <= 0.0 || duty_factor <= 0.0 || duty_factor > 1.0 ||
      friction_coefficient <= 0.0) {
    throw std::invalid_argument("gait: period, duty factor or friction invalid");
  }
  for (double offset : phase_offsets) {
    if (offset < 0.0 || offset >= 1.0) {
      throw std::invalid_argument("gait: phase offsets must lie in [0, 1)");
    }
  }
}

LegMode mode_at(const GaitSchedule& gait, double t, int leg) {
  double phase = std::fmod(t / gait.period - gait.phase_offsets[leg], 1.0);
  if (phase < 0.0) {
    phase += 1.0;
  }
  LegMode mode;
  if (phase < gait.duty_factor) {
    mode.stance = true;
    mode.phase_in_mode = phase / gait.duty_factor;
  } else {
    mode.stance = false;
    mode.phase_in_mode = (phase - gait.duty_factor) / (1.0 - gait.duty_factor);
  }
  return mode;
}

int stance_count(const GaitSchedule& gait, double t) {
  int count = 0;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (mode_at(gait, t, leg).stance) {
      ++count;
    }
  }
  return count;
}

SwingProfile SwingProfile::make(double apex_height, double touchdown_velocity,
                                double duration) {
  SwingProfile profile;
  profile.apex_height = apex_height;
  profile.touchdown_velocity = touchdown_velocity;
  profile.duration = duration;
  return profile;
}

namespace {

// Cubic Hermite segment on [0, 1] with values (p0, p1) and end slopes
// (m0, m1) already scaled to the unit interval.
double hermite(double tau, double p0, double p1, double m0, double m1) {
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + tau) * m0 +
         (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1;
}

double hermite_slope(double tau, double p0, double p1, double m0, double m1) {
  const double t2 = tau * tau;
  return (6.0 * t2 - 6.0 * tau) * p0 + (3.0 * t2 - 4.0 * tau + 1.0) * m0 +
         (-6.0 * t2 + 6.0 * tau) * p1 + (3.0 * t2 - 2.0 * tau) * m1;
}

}  // namespace

SwingReference swing_reference(const SwingProfile& profile, double phase) {
  const double s = std::min(std::max(phase, 0.0), 1.0);
  const double sa = profile.apex_phase;
  SwingReference reference;
  if (s <= sa) {
    // Lift-off to apex: zero boundary slopes.
    const double tau = s / sa;
    reference.displacement = hermite(tau, 0.0, profile.apex_height, 0.0, 0.0);
    reference.normal_velocity =
        hermite_slope(tau, 0.0, profile.apex_height, 0.0, 0.0) /
        (sa * profile.duration);
  } else {
    // Apex to touchdown: terminal slope is the approach velocity.
    const double span = 1.0 - sa;
    const double tau = (s - sa) / span;
    const double end_slope = profile.touchdown_velocity * profile.duration * span;
    reference.displacement =
        hermite(tau, profile.apex_height, 0.0, 0.0, end_slope);
    reference.normal_velocity =
        hermite_slope(tau, profile.apex_height, 0.0, 0.0, end_slope) /
        (span * profile.duration);
  }
  return reference;
}

}  // namespace fsmpc
