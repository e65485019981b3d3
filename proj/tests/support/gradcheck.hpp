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


// Finite-difference and naive-evaluation oracles for the network code.

#ifndef RTBLAB_TESTS_SUPPORT_GRADCHECK_HPP_
#define RTBLAB_TESTS_SUPPORT_GRADCHECK_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace rtblab::testing {

// Evaluates a ReLU MLP from its flat parameter vector with explicit loops.
// Layout per layer: out x in weights column-major, then out biases.
inline std::vector<double> naive_forward(const std::vector<int>& sizes, const Eigen::VectorXd& params,
                                         std::vector<double> x) {
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    std::vector<double> y(out, 0.0);
    for (int o = 0; o < out; ++o) {
      double sum = 0.0;
      for (int i = 0; i < in; ++i) sum += params[offset + static_cast<std::size_t>(i) * out + o] * x[i];
      sum += params[offset + static_cast<std::size_t>(in) * out + o];
      y[o] = (l + 2 < sizes.size()) ? std::max(0.0, sum) : sum;
    }
    offset += static_cast<std::size_t>(in + 1) * out;
    x = std::move(y);
  }
  return x;
}

// Central differences of f around params, one coordinate at a time.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& params, double eps = 1e-5) {
  Eigen::VectorXd grad(params.size());
  Eigen::VectorXd p = params;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    p[i] = params[i] + eps;
    const double up = f(p);
    p[i] = params[i] - eps;
    const double down = f(p);
    p[i] = params[i];
    grad[i] = (up - down) / (2 * eps);
  }
  return grad;
}

// Largest per-coordinate relative error; coordinates where both values are
// below `floor` in magnitude are compared absolutely.
inline double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                 double floor = 1e-7) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double scale = std::max(std::abs(analytic[i]), std::abs(numeric[i]));
    const double diff = std::abs(analytic[i] - numeric[i]);
    worst = std::max(worst, scale < floor ? diff : diff / scale);
  }
  return worst;
}

}  // namespace rtblab::testing

#endif  // RTBLAB_TESTS_SUPPORT_GRADCHECK_HPP_
