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

#ifndef RTBLAB_SAC_ADAM_HPP_
#define RTBLAB_SAC_ADAM_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rtblab::sac {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  AdamState() = default;
  explicit AdamState(Eigen::Index size) : m(Vector::Zero(size)), v(Vector::Zero(size)) {}

  Vector m;
  Vector v;
  std::int64_t step = 0;
};

// One bias-corrected Adam update of `params` in place.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> params,
               const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& grads, Scalar lr,
               const AdamConfig& config = {}) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  const Scalar b1 = static_cast<Scalar>(config.beta1);
  const Scalar b2 = static_cast<Scalar>(config.beta2);
  ++state.step;
  state.m = b1 * state.m + (Scalar(1) - b1) * grads;
  state.v = b2 * state.v + (Scalar(1) - b2) * grads.cwiseAbs2();
  const Scalar m_correction = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar v_correction = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  const Scalar eps = static_cast<Scalar>(config.epsilon);
  params.array() -= lr * (state.m.array() / m_correction) /
                    ((state.v.array() / v_correction).sqrt() + eps);
}

}  // namespace rtblab::sac

#endif  // RTBLAB_SAC_ADAM_HPP_
