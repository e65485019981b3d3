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

// Fully connected feed-forward network with ReLU hidden layers and a linear
// output layer. All parameters live in one contiguous vector (per layer: the
// weight matrix in column-major order, then the bias) so optimizers and
// target-network updates work on plain vectors.
//
// Batches are column-major: each column of an input matrix is one sample.

#ifndef RTBLAB_SAC_MLP_HPP_
#define RTBLAB_SAC_MLP_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtblab::sac {

template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  // Per-layer activations recorded by forward() for backward().
  // activations[0] is the input; activations[l + 1] is the output of layer l.
  struct Tape {
    std::vector<Matrix> activations;
  };

  Mlp() = default;

  // Sizes from input to output, e.g. {3, 128, 128, 2}. Parameters start at zero.
  explicit Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
    Eigen::Index count = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("Mlp layer sizes must be positive");
      offsets_.push_back(count);
      count += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
    }
    params_ = Vector::Zero(count);
  }

  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  template <typename Rng>
  void init_uniform(Rng& rng) {
    for (std::size_t l = 0; l < layers(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(sizes_[l]));
      std::uniform_real_distribution<double> dist(-static_cast<double>(bound), static_cast<double>(bound));
      const Eigen::Index begin = offsets_[l];
      const Eigen::Index end = begin + static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
      for (Eigen::Index i = begin; i < end; ++i) params_[i] = static_cast<Scalar>(dist(rng));
    }
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t layers() const { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Eigen::Index parameter_count() const { return params_.size(); }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  ConstMatrixMap weight(std::size_t l) const {
    return ConstMatrixMap(params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
  }
  MatrixMap weight(std::size_t l) { return MatrixMap(params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]); }
  ConstVectorMap bias(std::size_t l) const {
    return ConstVectorMap(params_.data() + offsets_[l] + weight_size(l), sizes_[l + 1]);
  }
  VectorMap bias(std::size_t l) { return VectorMap(params_.data() + offsets_[l] + weight_size(l), sizes_[l + 1]); }

  Matrix forward(const Eigen::Ref<const Matrix>& input) const {
    check_input(input);
    Matrix x = input;
    for (std::size_t l = 0; l < layers(); ++l) {
      Matrix y = weight(l) * x;
      y.colwise() += bias(l);
      if (l + 1 < layers()) y = y.cwiseMax(Scalar(0));
      x = std::move(y);
    }
    return x;
  }

  Matrix forward(const Eigen::Ref<const Matrix>& input, Tape& tape) const {
    check_input(input);
    tape.activations.resize(layers() + 1);
    tape.activations[0] = input;
    for (std::size_t l = 0; l < layers(); ++l) {
      Matrix y = weight(l) * tape.activations[l];
      y.colwise() += bias(l);
      if (l + 1 < layers()) y = y.cwiseMax(Scalar(0));
      tape.activations[l + 1] = std::move(y);
    }
    return tape.activations.back();
  }

  // Given dLoss/dOutput for the taped batch, adds dLoss/dParameters into
  // `grad` (sized like parameters()) and returns dLoss/dInput.
  Matrix backward(const Tape& tape, const Eigen::Ref<const Matrix>& grad_output, Vector& grad) const {
    if (tape.activations.size() != layers() + 1) throw std::invalid_argument("Mlp::backward: stale tape");
    if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: gradient size mismatch");
    if (grad_output.rows() != output_size() || grad_output.cols() != tape.activations[0].cols()) {
      throw std::invalid_argument("Mlp::backward: upstream gradient shape mismatch");
    }
    Matrix delta = grad_output;
    for (std::size_t l = layers(); l-- > 0;) {
      if (l + 1 < layers()) {
        delta = delta.cwiseProduct((tape.activations[l + 1].array() > Scalar(0)).template cast<Scalar>().matrix());
      }
      MatrixMap(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]).noalias() +=
          delta * tape.activations[l].transpose();
      VectorMap(grad.data() + offsets_[l] + weight_size(l), sizes_[l + 1]) += delta.rowwise().sum();
      Matrix upstream = weight(l).transpose() * delta;
      delta = std::move(upstream);
    }
    return delta;
  }

 private:
  Eigen::Index weight_size(std::size_t l) const { return static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l]; }

  void check_input(const Eigen::Ref<const Matrix>& input) const {
    if (input.rows() != input_size()) {
      throw std::invalid_argument("Mlp::forward: expected " + std::to_string(input_size()) + " input rows, got " +
                                  std::to_string(input.rows()));
    }
  }

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

}  // namespace rtblab::sac

#endif  // RTBLAB_SAC_MLP_HPP_
