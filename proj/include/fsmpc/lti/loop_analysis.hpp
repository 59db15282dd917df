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

#include <vector>

#include <Eigen/Core>

#include "fsmpc/lti/state_space.hpp"
#include "fsmpc/loopshaping/shaping_spec.hpp"

namespace fsmpc {

/// Sampled loop gain GK(jw) together with the multiplicative-uncertainty
/// stability margin sigma_min[I + GK(jw)^-1]. A margin entry is NaN where the
/// loop-gain sample is singular (margin undefined there).
struct LoopAnalysis {
  Eigen::VectorXd frequencies;              // rad/s, strictly increasing
  std::vector<Eigen::MatrixXcd> loop_gain;  // GK(jw) per grid point
  Eigen::VectorXd margin;                   // >= 0 or NaN where undefined

  /// |GK(jw)| per grid point; only meaningful for SISO samples.
  Eigen::VectorXd siso_magnitude() const;
};

/// Baseline vs frequency-shaped LQR loop gains of the same plant.
struct LoopGainComparison {
  LoopAnalysis baseline;
  LoopAnalysis shaped;
};

/// 200 log-spaced points over [1e-2, 1e4] rad/s, spanning well past the
/// shaping corner frequencies used in practice.
Eigen::VectorXd default_frequency_grid(int points = 200, double w_min = 1e-2,
                                       double w_max = 1e4);

/// Margin analysis of externally sampled loop gains. A candidate
/// multiplicative uncertainty bound l_m(w) is tolerated iff
/// l_m(w) < margin(w) on the grid.
LoopAnalysis stability_margin(const Eigen::VectorXd& frequencies,
                              std::vector<Eigen::MatrixXcd> loop_gain_samples);

/// Compares the LQR loop gain (loop broken at the plant input) of a SISO
/// plant under the baseline cost u'Ru against the frequency-shaped cost: the
/// plant is augmented with the inverse-filter realization of `spec`, LQR is
/// solved on the augmented system, and the loop is closed at the original
/// input. With alpha == beta the two analyses coincide.
LoopGainComparison loop_gain_compare(const StateSpaceRealization& plant,
                                     const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& R,
                                     const ShapingSpec& spec,
                                     const Eigen::VectorXd& frequencies);

}  // namespace fsmpc
