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

#include "rtblab/sac/sac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtblab/types.hpp"

namespace rtblab::sac {
namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Vector standard_normal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

void put_state(Matrix& m, Eigen::Index col, const BidState& s, double pctr_scale) {
  m(0, col) = s.avg_pctr_t * pctr_scale;
  m(1, col) = s.avbudget_ratio;
  m(2, col) = s.avimps_ratio;
}

}  // namespace

void SacConfig::validate() const {
  if (hidden.empty()) throw ConfigError("hidden layer list must not be empty");
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("hidden layer sizes must be positive");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
  if (buffer_capacity == 0) throw ConfigError("buffer capacity must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (train_every == 0) throw ConfigError("training interval must be positive");
  if (target_every == 0) throw ConfigError("target update period must be positive");
  if (!(lr_critic > 0.0) || !(lr_actor > 0.0) || !(lr_alpha > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (!std::isfinite(init_log_alpha)) throw ConfigError("initial log alpha must be finite");
  if (!std::isfinite(entropy_target)) throw ConfigError("entropy target must be finite");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) throw ConfigError("reward scale must be positive");
}

PolicyBundle make_bundle(const SacConfig& config, double pctr_scale, std::mt19937_64& rng) {
  config.validate();
  if (!(pctr_scale > 0.0) || !std::isfinite(pctr_scale)) throw ConfigError("pctr scale must be positive");
  PolicyBundle b;
  b.actor = Net(layer_sizes(kStateDim, config.hidden, 2 * kActionDim));
  b.q1 = Net(layer_sizes(kStateDim + kActionDim, config.hidden, 1));
  b.q2 = Net(layer_sizes(kStateDim + kActionDim, config.hidden, 1));
  b.actor.init_uniform(rng);
  b.q1.init_uniform(rng);
  b.q2.init_uniform(rng);
  b.target_q1 = b.q1;
  b.target_q2 = b.q2;
  b.log_alpha = config.init_log_alpha;
  b.entropy_target = config.entropy_target;
  b.pctr_scale = pctr_scale;
  b.actor_opt = AdamState<double>(b.actor.parameter_count());
  b.q1_opt = AdamState<double>(b.q1.parameter_count());
  b.q2_opt = AdamState<double>(b.q2.parameter_count());
  b.alpha_opt = AdamState<double>(1);
  return b;
}

Matrix encode_states(std::span<const BidState> states, double pctr_scale) {
  Matrix m(kStateDim, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) put_state(m, static_cast<Eigen::Index>(i), states[i], pctr_scale);
  return m;
}

Matrix encode_state(const BidState& state, double pctr_scale) {
  Matrix m(kStateDim, 1);
  put_state(m, 0, state, pctr_scale);
  return m;
}

Matrix critic_input(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Vector>& actions) {
  if (states.rows() != kStateDim || states.cols() != actions.size()) {
    throw std::invalid_argument("critic_input: states and actions disagree in shape");
  }
  Matrix x(kStateDim + kActionDim, states.cols());
  x.topRows(kStateDim) = states;
  x.row(kStateDim) = actions.transpose();
  return x;
}

SquashedSample<double> sample_action(const Net& actor, const Eigen::Ref<const Matrix>& states,
                                     const Eigen::Ref<const Vector>& noise, const SquashConfig& config) {
  const Matrix head = actor.forward(states);
  return sample_squashed<double>(head, noise, config);
}

double greedy_action(const Net& actor, const BidState& state, double pctr_scale) {
  const Matrix head = actor.forward(encode_state(state, pctr_scale));
  return std::tanh(head(0, 0));
}

Batch make_batch(std::span<const Transition> transitions, double pctr_scale, double reward_scale) {
  const auto n = static_cast<Eigen::Index>(transitions.size());
  Batch b;
  b.states.resize(kStateDim, n);
  b.next_states.resize(kStateDim, n);
  b.actions.resize(n);
  b.rewards.resize(n);
  b.not_done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[static_cast<std::size_t>(i)];
    put_state(b.states, i, t.state, pctr_scale);
    put_state(b.next_states, i, t.next_state, pctr_scale);
    b.actions[i] = t.action;
    b.rewards[i] = t.reward * reward_scale;
    b.not_done[i] = t.terminal ? 0.0 : 1.0;
  }
  return b;
}

Batch gather_batch(const ReplayBuffer& buffer, std::span<const std::size_t> indices, double pctr_scale,
                   double reward_scale) {
  std::vector<Transition> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(buffer[i]);
  return make_batch(picked, pctr_scale, reward_scale);
}

CriticLoss critic_loss(const PolicyBundle& bundle, const Batch& batch, double gamma,
                       const Eigen::Ref<const Vector>& next_noise, const SquashConfig& config) {
  const Eigen::Index n = batch.actions.size();
  if (n == 0) throw std::invalid_argument("critic_loss: empty batch");
  const double alpha = bundle.alpha();

  const SquashedSample<double> next = sample_action(bundle.actor, batch.next_states, next_noise, config);
  const Matrix next_in = critic_input(batch.next_states, next.action);
  const Vector tq1 = bundle.target_q1.forward(next_in).row(0).transpose();
  const Vector tq2 = bundle.target_q2.forward(next_in).row(0).transpose();
  const Vector soft_value = tq1.cwiseMin(tq2) - alpha * next.log_prob;

  CriticLoss out;
  out.target_q = batch.rewards + gamma * batch.not_done.cwiseProduct(soft_value);

  const Matrix in = critic_input(batch.states, batch.actions);
  const double inv_n = 1.0 / static_cast<double>(n);
  auto one = [&](const Net& q, double& loss, Vector& grad) {
    Net::Tape tape;
    const Matrix pred = q.forward(in, tape);
    const Vector err = pred.row(0).transpose() - out.target_q;
    loss = 0.5 * err.squaredNorm() * inv_n;
    grad = Vector::Zero(q.parameter_count());
    q.backward(tape, (err * inv_n).transpose(), grad);
  };
  one(bundle.q1, out.loss_q1, out.grad_q1);
  one(bundle.q2, out.loss_q2, out.grad_q2);
  return out;
}

ActorLoss actor_loss(const PolicyBundle& bundle, const Eigen::Ref<const Matrix>& states,
                     const Eigen::Ref<const Vector>& noise, const SquashConfig& config) {
  const Eigen::Index n = states.cols();
  if (n == 0) throw std::invalid_argument("actor_loss: empty batch");
  const double alpha = bundle.alpha();
  const double inv_n = 1.0 / static_cast<double>(n);

  Net::Tape actor_tape;
  const Matrix head = bundle.actor.forward(states, actor_tape);
  const SquashedSample<double> s = sample_squashed<double>(head, noise, config);

  const Matrix in = critic_input(states, s.action);
  Net::Tape t1, t2;
  const Vector v1 = bundle.q1.forward(in, t1).row(0).transpose();
  const Vector v2 = bundle.q2.forward(in, t2).row(0).transpose();

  // dQ/daction for each critic; the element-wise min routes each sample to one.
  Vector scratch1 = Vector::Zero(bundle.q1.parameter_count());
  Vector scratch2 = Vector::Zero(bundle.q2.parameter_count());
  const Matrix ones = Matrix::Ones(1, n);
  const Matrix dx1 = bundle.q1.backward(t1, ones, scratch1);
  const Matrix dx2 = bundle.q2.backward(t2, ones, scratch2);

  ActorLoss out;
  out.action = s.action;
  out.log_prob = s.log_prob;
  Vector grad_action(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool first = v1[i] <= v2[i];
    const double q = first ? v1[i] : v2[i];
    const double dq_da = first ? dx1(kStateDim, i) : dx2(kStateDim, i);
    total += alpha * s.log_prob[i] - q;
    grad_action[i] = -dq_da * inv_n;
  }
  out.loss = total * inv_n;
  const Vector grad_log_prob = Vector::Constant(n, alpha * inv_n);
  const Matrix grad_head = squashed_backward<double>(s, grad_action, grad_log_prob, config);
  out.grad = Vector::Zero(bundle.actor.parameter_count());
  bundle.actor.backward(actor_tape, grad_head, out.grad);
  return out;
}

TemperatureLoss temperature_loss(double log_alpha, const Eigen::Ref<const Vector>& log_prob, double entropy_target) {
  if (log_prob.size() == 0) throw std::invalid_argument("temperature_loss: empty batch");
  const double alpha = std::exp(log_alpha);
  const double mean_log_prob = log_prob.mean();
  TemperatureLoss out;
  out.loss = -alpha * (mean_log_prob + entropy_target);
  out.grad_log_alpha = out.loss;
  return out;
}

void soft_update(const Vector& source, Vector& target, double tau) {
  if (source.size() != target.size()) throw std::invalid_argument("soft_update: size mismatch");
  target = tau * source + (1.0 - tau) * target;
}

TrainLog train_rounds(PolicyBundle& bundle, const ReplayBuffer& buffer, const SacConfig& config,
                      std::mt19937_64& rng) {
  TrainLog log;
  if (buffer.size() < config.batch_size) {
    log.skipped = true;
    return log;
  }
  const auto n = static_cast<Eigen::Index>(config.batch_size);
  for (std::size_t l = 0; l < config.rounds; ++l) {
    const std::vector<std::size_t> idx = buffer.sample_indices(config.batch_size, rng);
    const Batch batch = gather_batch(buffer, idx, bundle.pctr_scale, config.reward_scale);

    const Vector next_noise = standard_normal(n, rng);
    const CriticLoss cl = critic_loss(bundle, batch, config.gamma, next_noise, config.squash);
    adam_step<double>(bundle.q1_opt, bundle.q1.parameters(), cl.grad_q1, config.lr_critic, config.adam);
    adam_step<double>(bundle.q2_opt, bundle.q2.parameters(), cl.grad_q2, config.lr_critic, config.adam);

    const Vector noise = standard_normal(n, rng);
    const ActorLoss al = actor_loss(bundle, batch.states, noise, config.squash);
    adam_step<double>(bundle.actor_opt, bundle.actor.parameters(), al.grad, config.lr_actor, config.adam);

    const TemperatureLoss tl = temperature_loss(bundle.log_alpha, al.log_prob, bundle.entropy_target);
    Vector log_alpha(1);
    log_alpha[0] = bundle.log_alpha;
    Vector grad(1);
    grad[0] = tl.grad_log_alpha;
    adam_step<double>(bundle.alpha_opt, log_alpha, grad, config.lr_alpha, config.adam);
    bundle.log_alpha = log_alpha[0];

    ++bundle.rounds_done;
    if (bundle.rounds_done % static_cast<std::int64_t>(config.target_every) == 0) {
      soft_update(bundle.q1.parameters(), bundle.target_q1.parameters(), config.tau);
      soft_update(bundle.q2.parameters(), bundle.target_q2.parameters(), config.tau);
    }

    RoundStats r;
    r.loss_q1 = cl.loss_q1;
    r.loss_q2 = cl.loss_q2;
    r.loss_actor = al.loss;
    r.alpha = bundle.alpha();
    r.entropy = -al.log_prob.mean();
    log.last = r;
    log.mean.loss_q1 += r.loss_q1;
    log.mean.loss_q2 += r.loss_q2;
    log.mean.loss_actor += r.loss_actor;
    log.mean.alpha += r.alpha;
    log.mean.entropy += r.entropy;
    ++log.rounds;
  }
  if (log.rounds == 0) return log;
  const double k = static_cast<double>(log.rounds);
  log.mean.loss_q1 /= k;
  log.mean.loss_q2 /= k;
  log.mean.loss_actor /= k;
  log.mean.alpha /= k;
  log.mean.entropy /= k;
  return log;
}

SacAgent::SacAgent(const SacConfig& config, double pctr_scale, std::uint64_t seed)
    : config_(config), rng_(seed), bundle_(make_bundle(config_, pctr_scale, rng_)), buffer_(config_.buffer_capacity) {}

double SacAgent::act(const BidState& state) {
  Vector noise = standard_normal(1, rng_);
  const SquashedSample<double> s = sample_action(bundle_.actor, encode_state(state, bundle_.pctr_scale), noise,
                                                 config_.squash);
  return s.action[0];
}

double SacAgent::act_greedy(const BidState& state) const {
  const double bound = std::nextafter(1.0, 0.0);
  return std::clamp(greedy_action(bundle_.actor, state, bundle_.pctr_scale), -bound, bound);
}

void SacAgent::observe(const Transition& transition) {
  buffer_.push(transition);
  if (buffer_.total_pushed() % config_.train_every == 0) {
    history_.push_back(train_rounds(bundle_, buffer_, config_, rng_));
  }
}

}  // namespace rtblab::sac
