// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adamrel/errors.hpp"

namespace adamrel::rl {

void DqnConfig::validate() const {
  if (buffer_capacity < 1 || batch_size < 1)
    throw std::invalid_argument("dqn: buffer_capacity and batch_size must be positive");
  if (batch_size > buffer_capacity)
    throw std::invalid_argument("dqn: batch_size exceeds buffer_capacity");
  if (target_update_interval < 1 || train_frequency < 1 || learning_starts < 0)
    throw std::invalid_argument("dqn: intervals must be positive");
  if (polyak_tau && !(*polyak_tau > 0.0 && *polyak_tau <= 1.0))
    throw std::invalid_argument("dqn: polyak_tau must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("dqn: gamma must lie in [0, 1]");
  if (!(epsilon_end <= epsilon_start))
    throw std::invalid_argument("dqn: epsilon_end must not exceed epsilon_start");
  if (!(epsilon_end >= 0.0 && epsilon_start <= 1.0))
    throw std::invalid_argument("dqn: epsilons must lie in [0, 1]");
  if (!(exploration_fraction >= 0.0)) throw std::invalid_argument("dqn: exploration_fraction must be >= 0");
  if (hidden.empty()) throw std::invalid_argument("dqn: need at least one hidden layer");
  if (eval_interval < 0) throw std::invalid_argument("dqn: eval_interval must be >= 0");
  optimizer.validate();
}

std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw std::invalid_argument("epsilon_greedy: no actions");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.below(q_values.size());
  return nn::argmax(q_values);
}

double linear_schedule(double start, double end, double duration, double step) {
  if (duration <= 0.0 || step >= duration) return end;
  const double slope = (end - start) / duration;
  return std::max(slope * step + start, std::min(start, end));
}

std::vector<double> td_targets(std::span<const double> rewards, const nn::Matrix& q_next,
                               std::span<const unsigned char> dones, double gamma) {
  if (rewards.size() != q_next.rows || dones.size() != q_next.rows)
    throw std::invalid_argument("td_targets: shape mismatch");
  std::vector<double> y(rewards.size());
  for (std::size_t r = 0; r < y.size(); ++r) {
    const auto row = q_next.row(r);
    const double best = *std::max_element(row.begin(), row.end());
    y[r] = rewards[r] + (dones[r] ? 0.0 : gamma * best);
  }
  return y;
}

DqnLoss dqn_loss(const nn::MlpSpec& spec, const nn::FlatParams& online, const nn::Matrix& obs,
                 std::span<const std::size_t> actions, std::span<const double> targets) {
  if (actions.size() != obs.rows || targets.size() != obs.rows)
    throw std::invalid_argument("dqn_loss: shape mismatch");
  const auto trace = nn::forward_trace(spec, online, obs);
  const auto heads = nn::split_heads(spec, trace.activations.back());
  nn::HeadGrads upstream;
  upstream.d_logits = nn::Matrix(obs.rows, spec.head.actions);
  const double inv_b = 1.0 / static_cast<double>(obs.rows);
  DqnLoss out;
  for (std::size_t r = 0; r < obs.rows; ++r) {
    const double diff = heads.logits(r, actions[r]) - targets[r];
    out.loss += diff * diff * inv_b;
    upstream.d_logits(r, actions[r]) = 2.0 * diff * inv_b;
  }
  if (!std::isfinite(out.loss)) throw PoisonedGradientError("dqn_loss: non-finite loss");
  out.grads = nn::backward(spec, online, trace, upstream);
  return out;
}

void polyak_update(std::span<double> target, std::span<const double> online, double tau) {
  if (target.size() != online.size()) throw std::invalid_argument("polyak_update: size mismatch");
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = (1.0 - tau) * target[i] + tau * online[i];
}

nn::MlpSpec dqn_network(const DqnConfig& config, const envs::Environment& env) {
  nn::MlpSpec spec;
  spec.layer_sizes.push_back(env.observation_dim());
  spec.layer_sizes.insert(spec.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
  spec.layer_sizes.push_back(env.action_count());
  spec.activation = config.activation;
  spec.head = nn::OutputHead::categorical(env.action_count());
  spec.validate();
  return spec;
}

TrainResult dqn_train(const envs::Environment& prototype, const DqnConfig& config,
                      std::int64_t total_steps, std::uint64_t seed) {
  config.validate();
  if (total_steps < 0) throw std::invalid_argument("dqn_train: total_steps must be >= 0");

  TrainResult result;
  result.spec = dqn_network(config, prototype);
  const auto& spec = result.spec;
  result.params = nn::init_params(spec, derive_seed(seed, 0));
  auto& online = result.params;
  nn::FlatParams target = online;
  optim::Optimizer opt(config.optimizer, online.size());
  Rng explore_rng(derive_seed(seed, 1));
  Rng sample_rng(derive_seed(seed, 2));
  const std::uint64_t eval_root = derive_seed(seed, 3);
  const std::uint64_t episode_root = derive_seed(seed, 100);

  const std::size_t obs_dim = prototype.observation_dim();
  ReplayBuffer buffer(config.buffer_capacity, obs_dim);
  auto env = prototype.clone();
  std::uint64_t episode_count = 0;
  auto obs = env->reset(derive_seed(episode_root, episode_count++));
  double episode_return = 0.0;

  const GreedyPolicy greedy = [&](std::span<const double> o) {
    nn::Matrix in(1, obs_dim);
    std::copy(o.begin(), o.end(), in.data.begin());
    return nn::argmax(nn::forward(spec, online, in).logits.row(0));
  };

  const double explore_steps = config.exploration_fraction * static_cast<double>(total_steps);
  EpisodeAccumulator finished;
  std::int64_t chunk = 0;
  std::int64_t pos = 0;
  std::int64_t update_index = 0;
  std::int64_t evals_done = 0;
  nn::Matrix in(1, obs_dim);
  nn::Matrix batch_obs(config.batch_size, obs_dim);
  nn::Matrix batch_next(config.batch_size, obs_dim);
  std::vector<std::size_t> batch_actions(config.batch_size);
  std::vector<double> batch_rewards(config.batch_size);
  std::vector<unsigned char> batch_dones(config.batch_size);

  for (std::int64_t step = 0; step < total_steps; ++step) {
    const double epsilon = linear_schedule(config.epsilon_start, config.epsilon_end,
                                           explore_steps, static_cast<double>(step));
    std::copy(obs.begin(), obs.end(), in.data.begin());
    const auto q = nn::forward(spec, online, in);
    const std::size_t action = epsilon_greedy(q.logits.row(0), epsilon, explore_rng);
    auto out = env->step(action);
    buffer.add(obs, action, out.reward, out.observation, out.done);
    episode_return += out.reward;
    if (out.done) {
      result.episodes.push_back({step + 1, episode_return});
      finished.add(episode_return);
      episode_return = 0.0;
      obs = env->reset(derive_seed(episode_root, episode_count++));
    } else {
      obs = std::move(out.observation);
    }

    if (step >= config.learning_starts) {
      if (step % config.train_frequency == 0) {
        const auto idx = buffer.sample_indices(config.batch_size, sample_rng);
        for (std::size_t r = 0; r < idx.size(); ++r) {
          const auto o = buffer.obs(idx[r]);
          const auto n = buffer.next_obs(idx[r]);
          std::copy(o.begin(), o.end(), batch_obs.row(r).begin());
          std::copy(n.begin(), n.end(), batch_next.row(r).begin());
          batch_actions[r] = buffer.action(idx[r]);
          batch_rewards[r] = buffer.reward(idx[r]);
          batch_dones[r] = buffer.done(idx[r]) ? 1 : 0;
        }
        const auto q_next = nn::forward(spec, target, batch_next);
        const auto y = td_targets(batch_rewards, q_next.logits, batch_dones, config.gamma);
        try {
          const auto loss = dqn_loss(spec, online, batch_obs, batch_actions, y);
          const auto res = opt.step(loss.grads, online.values);
          telemetry::MetricsRow row;
          row.record = {update_index, chunk, pos, res.pre_clip_grad_norm, res.update_norm,
                        res.max_abs_update, static_cast<std::int64_t>(opt.state().t_local)};
          row.episode_return = finished.take();
          result.metrics.push_back(row);
        } catch (const PoisonedGradientError& err) {
          throw PoisonedGradientError("dqn_train: env step " + std::to_string(step) + ": " +
                                      err.what());
        }
        ++update_index;
        ++pos;
        if (config.polyak_tau) polyak_update(target.values, online.values, *config.polyak_tau);
      }
      if (step % config.target_update_interval == 0) {
        if (!config.polyak_tau) target.values = online.values;
        opt.notify_boundary();
        ++chunk;
        pos = 0;
      }
    }

    if (config.eval_interval > 0 && (step + 1) % config.eval_interval == 0) {
      ++evals_done;
      result.evaluations.push_back(
          {step + 1, evaluate_greedy(prototype, greedy,
                                     derive_seed(eval_root, static_cast<std::uint64_t>(evals_done)))});
      if (config.stop_return && result.evaluations.back().value >= *config.stop_return) {
        result.env_steps = step + 1;
        break;
      }
    }
  }

  result.optimizer_state = opt.state();
  if (result.env_steps == 0) result.env_steps = total_steps;
  return result;
}

}  // namespace adamrel::rl
