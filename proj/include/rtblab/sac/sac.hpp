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

// Maximum-entropy actor-critic over the bid adjustment factor.
//
// The actor maps the three-feature bidding state to a tanh-squashed Gaussian
// over a in (-1, 1). Two critics score (state, action); each has a target
// copy that only moves by Polyak averaging. The temperature is learned in log
// space against an entropy target.

#ifndef RTBLAB_SAC_SAC_HPP_
#define RTBLAB_SAC_SAC_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rtblab/env.hpp"
#include "rtblab/sac/adam.hpp"
#include "rtblab/sac/mlp.hpp"
#include "rtblab/sac/replay_buffer.hpp"
#include "rtblab/sac/squashed_gaussian.hpp"

namespace rtblab::sac {

using Net = Mlp<double>;
using Matrix = Net::Matrix;
using Vector = Net::Vector;

inline constexpr int kStateDim = 3;
inline constexpr int kActionDim = 1;

struct SacConfig {
  std::vector<int> hidden = {128, 128};
  double gamma = 1.0;
  double tau = 0.0005;
  std::size_t buffer_capacity = 1000000;
  std::size_t batch_size = 256;
  std::size_t train_every = 30000;  // k: train after this many new transitions
  std::size_t rounds = 128;         // L: rounds per training
  std::size_t target_every = 4;     // d: soft update period in rounds
  double lr_critic = 3e-4;
  double lr_actor = 3e-4;
  double lr_alpha = 3e-4;
  double init_log_alpha = 0.0;
  double entropy_target = -static_cast<double>(kActionDim);
  double reward_scale = 1.0;
  SquashConfig squash;
  AdamConfig adam;

  void validate() const;
};

struct PolicyBundle {
  Net actor;
  Net q1, q2;
  Net target_q1, target_q2;
  double log_alpha = 0.0;
  double entropy_target = -1.0;
  // Multiplies avg_pctr_t so the feature is O(1); 1 / training avg pCTR.
  double pctr_scale = 1.0;

  AdamState<double> actor_opt, q1_opt, q2_opt, alpha_opt;
  std::int64_t rounds_done = 0;

  double alpha() const { return std::exp(log_alpha); }
};

// Random actor/critics; targets start as exact copies of the critics.
PolicyBundle make_bundle(const SacConfig& config, double pctr_scale, std::mt19937_64& rng);

// Feature matrix (3 x n) for the networks.
Matrix encode_states(std::span<const BidState> states, double pctr_scale);
Matrix encode_state(const BidState& state, double pctr_scale);

// Critic input: state rows stacked over one action row.
Matrix critic_input(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Vector>& actions);

SquashedSample<double> sample_action(const Net& actor, const Eigen::Ref<const Matrix>& states,
                                     const Eigen::Ref<const Vector>& noise, const SquashConfig& config = {});

// tanh(mean): the action used when evaluating a frozen actor.
double greedy_action(const Net& actor, const BidState& state, double pctr_scale);

struct Batch {
  Matrix states;       // 3 x n
  Vector actions;      // n
  Vector rewards;      // n
  Matrix next_states;  // 3 x n
  Vector not_done;     // n, 0 on terminal transitions
};

Batch make_batch(std::span<const Transition> transitions, double pctr_scale, double reward_scale = 1.0);
Batch gather_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices, double pctr_scale,
                   double reward_scale = 1.0);

struct CriticLoss {
  double loss_q1 = 0.0;
  double loss_q2 = 0.0;
  Vector target_q;
  Vector grad_q1;  // d loss_q1 / d q1 parameters
  Vector grad_q2;
};

// target = r + gamma * not_done * (min target Q(s', a') - alpha * log pi(a'|s'))
// with a' drawn from the actor at s' using next_noise; loss = 0.5 mean sq. error.
CriticLoss critic_loss(const PolicyBundle& bundle, const Batch& batch, double gamma,
                       const Eigen::Ref<const Vector>& next_noise, const SquashConfig& config = {});

struct ActorLoss {
  double loss = 0.0;
  Vector grad;      // d loss / d actor parameters
  Vector log_prob;  // of the reparameterized actions
  Vector action;
};

// mean(alpha * log pi(a|s) - min(Q1, Q2)(s, a)) with a = tanh(mean + scale * noise).
ActorLoss actor_loss(const PolicyBundle& bundle, const Eigen::Ref<const Matrix>& states,
                     const Eigen::Ref<const Vector>& noise, const SquashConfig& config = {});

struct TemperatureLoss {
  double loss = 0.0;
  double grad_log_alpha = 0.0;
};

// mean(-alpha * log pi - alpha * H0), differentiated in log_alpha.
TemperatureLoss temperature_loss(double log_alpha, const Eigen::Ref<const Vector>& log_prob, double entropy_target);

// target <- tau * source + (1 - tau) * target
void soft_update(const Vector& source, Vector& target, double tau);

struct RoundStats {
  double loss_q1 = 0.0;
  double loss_q2 = 0.0;
  double loss_actor = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;  // -mean log pi
};

struct TrainLog {
  std::size_t rounds = 0;
  bool skipped = false;  // buffer smaller than one batch
  RoundStats last;
  RoundStats mean;
};

// Runs `config.rounds` update rounds sampled from the buffer.
TrainLog train_rounds(PolicyBundle& bundle, const ReplayBuffer& buffer, const SacConfig& config,
                      std::mt19937_64& rng);

// Couples a bundle with its buffer and random stream for on-line training:
// act() samples stochastically, observe() stores transitions and trains every
// `train_every` of them.
class SacAgent {
 public:
  SacAgent(const SacConfig& config, double pctr_scale, std::uint64_t seed);

  double act(const BidState& state);
  double act_greedy(const BidState& state) const;
  void observe(const Transition& transition);

  const PolicyBundle& bundle() const { return bundle_; }
  PolicyBundle& bundle() { return bundle_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const SacConfig& config() const { return config_; }
  const std::vector<TrainLog>& train_history() const { return history_; }

 private:
  SacConfig config_;
  std::mt19937_64 rng_;
  PolicyBundle bundle_;
  ReplayBuffer buffer_;
  std::vector<TrainLog> history_;
};

}  // namespace rtblab::sac

#endif  // RTBLAB_SAC_SAC_HPP_
