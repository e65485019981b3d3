// Copyright 2026 The rtblab Authors
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

// tanh-squashed diagonal Gaussian over a one-dimensional action.
//
// The policy head emits (mean, raw log-scale) per sample. With standard
// normal noise xi supplied by the caller,
//
//   u = mean + exp(log_scale) * xi,   action = tanh(u),
//   log_prob = log N(u; mean, scale) - log(1 - tanh(u)^2 + epsilon).
//
// log_scale is the raw head output clamped to [log_std_min, log_std_max].
// tanh rounds to +-1 for |u| beyond about 19, so the action is pulled back to
// the largest representable magnitude below 1.

#ifndef RTBLAB_SAC_SQUASHED_GAUSSIAN_HPP_
#define RTBLAB_SAC_SQUASHED_GAUSSIAN_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rtblab::sac {

struct SquashConfig {
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  double epsilon = 1e-6;
};

template <typename Scalar>
struct SquashedSample {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector action;
  Vector log_prob;
  Vector pre_tanh;
  Vector log_scale;
  Vector noise;
  Eigen::Array<bool, Eigen::Dynamic, 1> scale_clamped;
};

// head is 2 x batch (row 0 mean, row 1 raw log-scale); noise has batch entries.
template <typename Scalar>
SquashedSample<Scalar> sample_squashed(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& head,
                                       const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& noise,
                                       const SquashConfig& config = {}) {
  if (head.rows() != 2 || head.cols() != noise.size()) {
    throw std::invalid_argument("sample_squashed: head must be 2 x batch matching noise");
  }
  const Scalar lo = static_cast<Scalar>(config.log_std_min);
  const Scalar hi = static_cast<Scalar>(config.log_std_max);
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  const Scalar half_log_two_pi = Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  const Scalar bound = std::nextafter(Scalar(1), Scalar(0));

  SquashedSample<Scalar> s;
  const Eigen::Index n = noise.size();
  s.noise = noise;
  s.action.resize(n);
  s.log_prob.resize(n);
  s.pre_tanh.resize(n);
  s.log_scale.resize(n);
  s.scale_clamped.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar raw = head(1, i);
    const Scalar log_scale = std::clamp(raw, lo, hi);
    s.scale_clamped[i] = raw < lo || raw > hi;
    const Scalar u = head(0, i) + std::exp(log_scale) * noise[i];
    const Scalar a = std::clamp(std::tanh(u), -bound, bound);
    s.log_scale[i] = log_scale;
    s.pre_tanh[i] = u;
    s.action[i] = a;
    s.log_prob[i] = Scalar(-0.5) * noise[i] * noise[i] - log_scale - half_log_two_pi -
                    std::log(Scalar(1) - a * a + eps);
  }
  return s;
}

// Chain rule from per-sample dL/daction and dL/dlog_prob back to the head.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> squashed_backward(
    const SquashedSample<Scalar>& s, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& grad_action,
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& grad_log_prob, const SquashConfig& config = {}) {
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  const Eigen::Index n = s.action.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> grad_head(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar a = s.action[i];
    const Scalar one_minus_a2 = Scalar(1) - a * a;
    // d log_prob / du through the change-of-variables term only; the
    // Gaussian term depends on the fixed noise.
    const Scalar dlogp_du = Scalar(2) * a * one_minus_a2 / (one_minus_a2 + eps);
    const Scalar grad_u = grad_action[i] * one_minus_a2 + grad_log_prob[i] * dlogp_du;
    grad_head(0, i) = grad_u;
    const Scalar grad_log_scale = grad_u * std::exp(s.log_scale[i]) * s.noise[i] - grad_log_prob[i];
    grad_head(1, i) = s.scale_clamped[i] ? Scalar(0) : grad_log_scale;
  }
  return grad_head;
}

}  // namespace rtblab::sac

#endif  // RTBLAB_SAC_SQUASHED_GAUSSIAN_HPP_
