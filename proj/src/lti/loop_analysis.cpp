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

#include "fsmpc/lti/loop_analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "fsmpc/common/errors.hpp"
#include "fsmpc/lti/lqr.hpp"
#include "fsmpc/loopshaping/filter_bank.hpp"

namespace fsmpc {

Eigen::VectorXd LoopAnalysis::siso_magnitude() const {
  Eigen::VectorXd magnitude(frequencies.size());
  for (int k = 0; k < frequencies.size(); ++k) {
    magnitude[k] = std::abs(loop_gain[k](0, 0));
  }
  return magnitude;
}

Eigen::VectorXd default_frequency_grid(int points, double w_min, double w_max) {
  Eigen::VectorXd grid(points);
  const double log_min = std::log10(w_min);
  const double log_max = std::log10(w_max);
  for (int k = 0; k < points; ++k) {
    grid[k] = std::pow(10.0, log_min + (log_max - log_min) * k / (points - 1));
  }
  return grid;
}

LoopAnalysis stability_margin(const Eigen::VectorXd& frequencies,
                              std::vector<Eigen::MatrixXcd> loop_gain_samples) {
  if (static_cast<int>(loop_gain_samples.size()) != frequencies.size()) {
    throw std::invalid_argument("stability_margin: sample count mismatch");
  }
  for (int k = 1; k < frequencies.size(); ++k) {
    if (frequencies[k] <= frequencies[k - 1]) {
      throw std::invalid_argument("stability_margin: grid must be increasing");
    }
  }

  LoopAnalysis analysis;
  analysis.frequencies = frequencies;
  analysis.loop_gain = std::move(loop_gain_samples);
  analysis.margin.resize(frequencies.size());
  for (int k = 0; k < frequencies.size(); ++k) {
    const Eigen::MatrixXcd& gk = analysis.loop_gain[k];
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(gk);
    if (!lu.isInvertible()) {
      // Margin undefined at a singular sample; flagged, not fatal.
      analysis.margin[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const Eigen::MatrixXcd return_difference =
        Eigen::MatrixXcd::Identity(gk.rows(), gk.cols()) + lu.inverse();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(return_difference);
    analysis.margin[k] = svd.singularValues().minCoeff();
  }
  return analysis;
}

namespace {

// Classical LQR loop transfer function K (jwI - A)^-1 B, the loop broken at
// the input the regulator acts on. For the shaped case that input is the
// auxiliary one, so the inverse filter sits in series inside the loop and
// its unit DC gain carries the low-frequency loop shape over unchanged.
LoopAnalysis sampled_loop_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& K,
                               const Eigen::VectorXd& frequencies) {
  StateSpaceRealization loop(A, B, K, Eigen::MatrixXd::Zero(K.rows(), B.cols()));
  std::vector<Eigen::MatrixXcd> samples;
  samples.reserve(frequencies.size());
  for (int k = 0; k < frequencies.size(); ++k) {
    samples.push_back(ss_freq_response(loop, frequencies[k]));
  }
  return stability_margin(frequencies, std::move(samples));
}

}  // namespace

LoopGainComparison loop_gain_compare(const StateSpaceRealization& plant,
                                     const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& R,
                                     const ShapingSpec& spec,
                                     const Eigen::VectorXd& frequencies) {
  if (plant.input_dim() != 1) {
    throw std::invalid_argument("loop_gain_compare: plant must be single-input");
  }
  if (spec.input_dim() != 1) {
    throw std::invalid_argument("loop_gain_compare: spec must cover one input");
  }
  const int n = plant.state_dim();

  LoopGainComparison comparison;

  // Baseline LQR on the raw plant.
  const auto baseline = lqr_gain(plant.A, plant.B, Q, R);
  comparison.baseline =
      sampled_loop_gain(plant.A, plant.B, baseline.K, frequencies);

  // Frequency-shaped LQR: augment with the inverse-filter bank, place the
  // original Q on the plant states only, and solve for the auxiliary input.
  const FilterBank bank = make_filter_bank(spec);
  const int n_s = bank.state_dim();
  Eigen::MatrixXd A_aug(n + n_s, n + n_s);
  A_aug.setZero();
  A_aug.topLeftCorner(n, n) = plant.A;
  Eigen::MatrixXd B_aug(n + n_s, 1);
  if (n_s > 0) {
    A_aug.topRightCorner(n, n_s) = plant.B * bank.C_s;
    A_aug.bottomRightCorner(n_s, n_s) = bank.A_s;
    B_aug.topRows(n) = plant.B * bank.D_s;
    B_aug.bottomRows(n_s) = bank.B_s;
  } else {
    B_aug = plant.B * bank.D_s;
  }
  Eigen::MatrixXd Q_aug = Eigen::MatrixXd::Zero(n + n_s, n + n_s);
  Q_aug.topLeftCorner(n, n) = Q;

  const auto shaped = lqr_gain(A_aug, B_aug, Q_aug, R);
  comparison.shaped = sampled_loop_gain(A_aug, B_aug, shaped.K, frequencies);
  return comparison;
}

}  // namespace fsmpc
