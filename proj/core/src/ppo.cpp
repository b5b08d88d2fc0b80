// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "adamrel/errors.hpp"
#include "adamrel/gae.hpp"

namespace adamrel::rl {

void PpoConfig::validate() const {
  if (num_envs < 1 || rollout_steps < 1 || num_epochs < 1 || num_minibatches < 1)
    throw std::invalid_argument("ppo: counts must be positive");
  if (batch_size() % num_minibatches != 0)
    throw std::invalid_argument("ppo: num_envs * rollout_steps must be divisible by "
                                "num_minibatches");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo: gamma must lie in (0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("ppo: gae_lambda must lie in [0, 1]");
  if (!(clip_eps > 0.0)) throw std::invalid_argument("ppo: clip_eps must be positive");
  if (!(entropy_coef >= 0.0) || !(value_coef >= 0.0))
    throw std::invalid_argument("ppo: loss coefficients must be nonnegative");
  if (hidden.empty()) throw std::invalid_argument("ppo: need at least one hidden layer");
  if (eval_interval < 0) throw std::invalid_argument("ppo: eval_interval must be >= 0");
  optimizer.validate();
}

RolloutBatch::RolloutBatch(std::size_t steps_, std::size_t envs_, std::size_t obs_dim_)
    : steps(steps_),
      envs(envs_),
      obs_dim(obs_dim_),
      observations(steps_ * envs_, obs_dim_),
      actions(steps_ * envs_),
      log_probs(steps_ * envs_),
      rewards(steps_ * envs_),
      dones(steps_ * envs_),
      values(steps_ * envs_) {}

double clipped_surrogate(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_surrogate_grad(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return ratio * advantage <= clipped * advantage ? advantage : 0.0;
}

std::vector<double> normalize_advantages(std::span<const double> advantages) {
  if (advantages.empty()) return {};
  const double n = static_cast<double>(advantages.size());
  const double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : advantages) ss += (a - mean) * (a - mean);
  const double sd = std::max(std::sqrt(ss / n), 1e-8);
  std::vector<double> out(advantages.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (advantages[i] - mean) / sd;
  return out;
}

PpoLoss ppo_loss(const nn::MlpSpec& spec, const nn::FlatParams& params,
                 const RolloutBatch& batch, std::span<const std::size_t> indices,
                 const PpoConfig& config) {
  if (spec.head.kind != nn::OutputHead::Kind::Dual)
    throw std::invalid_argument("ppo_loss: network needs a dual (policy + value) head");
  if (batch.advantages.size() != batch.size())
    throw std::invalid_argument("ppo_loss: advantages not populated");
  const std::size_t b = indices.size();
  if (b == 0) throw std::invalid_argument("ppo_loss: empty minibatch");
  const std::size_t n_actions = spec.head.actions;

  nn::Matrix obs(b, batch.obs_dim);
  std::vector<double> adv(b);
  for (std::size_t r = 0; r < b; ++r) {
    const std::size_t i = indices[r];
    if (i >= batch.size()) throw std::invalid_argument("ppo_loss: index out of range");
    std::copy_n(batch.observations.data.data() + i * batch.obs_dim, batch.obs_dim,
                obs.data.data() + r * batch.obs_dim);
    adv[r] = batch.advantages[i];
  }
  if (config.normalize_advantages) adv = normalize_advantages(adv);

  const auto trace = nn::forward_trace(spec, params, obs);
  const auto heads = nn::split_heads(spec, trace.activations.back());

  nn::HeadGrads upstream;
  upstream.d_logits = nn::Matrix(b, n_actions);
  upstream.d_values.assign(b, 0.0);

  const double inv_b = 1.0 / static_cast<double>(b);
  double actor_sum = 0.0, value_sum = 0.0, entropy_sum = 0.0;
  std::size_t clipped = 0;
  for (std::size_t r = 0; r < b; ++r) {
    const std::size_t i = indices[r];
    const std::size_t a = batch.actions[i];
    const auto logp = nn::log_softmax(heads.logits.row(r));
    const double ratio = std::exp(logp[a] - batch.log_probs[i]);
    if (std::abs(ratio - 1.0) > config.clip_eps) ++clipped;

    actor_sum += clipped_surrogate(ratio, adv[r], config.clip_eps);
    const double d_lp = -clipped_surrogate_grad(ratio, adv[r], config.clip_eps) * ratio * inv_b;

    double h = 0.0;
    for (double lp : logp) h -= std::exp(lp) * lp;
    entropy_sum += h;

    auto d_row = upstream.d_logits.row(r);
    for (std::size_t j = 0; j < n_actions; ++j) {
      const double p = std::exp(logp[j]);
      d_row[j] = d_lp * ((j == a ? 1.0 : 0.0) - p) +
                 config.entropy_coef * inv_b * p * (logp[j] + h);
    }

    const double v = heads.values[r];
    const double ret = batch.returns[i];
    const double err = v - ret;
    double loss = err * err;
    double d_v = 2.0 * err;
    if (config.value_clip) {
      const double old = batch.values[i];
      const double delta = std::clamp(v - old, -config.clip_eps, config.clip_eps);
      const double err_c = old + delta - ret;
      if (err_c * err_c > loss) {
        loss = err_c * err_c;
        d_v = std::abs(v - old) < config.clip_eps ? 2.0 * err_c : 0.0;
      }
    }
    value_sum += loss;
    upstream.d_values[r] = config.value_coef * d_v * inv_b;
  }

  PpoLoss out;
  out.actor_loss = -actor_sum * inv_b;
  out.value_loss = value_sum * inv_b;
  out.entropy = entropy_sum * inv_b;
  out.clip_fraction = static_cast<double>(clipped) * inv_b;
  out.loss = out.actor_loss + config.value_coef * out.value_loss -
             config.entropy_coef * out.entropy;
  if (!std::isfinite(out.loss)) {
    throw PoisonedGradientError("ppo_loss: non-finite loss (actor " +
                                std::to_string(out.actor_loss) + ", value " +
                                std::to_string(out.value_loss) + ", entropy " +
                                std::to_string(out.entropy) + ")");
  }
  out.grads = nn::backward(spec, params, trace, upstream);
  return out;
}

nn::MlpSpec ppo_network(const PpoConfig& config, const envs::Environment& env) {
  nn::MlpSpec spec;
  spec.layer_sizes.push_back(env.observation_dim());
  spec.layer_sizes.insert(spec.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
  spec.layer_sizes.push_back(env.action_count() + 1);
  spec.activation = config.activation;
  spec.head = nn::OutputHead::dual(env.action_count());
  spec.validate();
  return spec;
}

TrainResult ppo_train(const envs::Environment& prototype, const PpoConfig& config,
                      std::int64_t total_steps, std::uint64_t seed) {
  config.validate();
  if (total_steps < 0) throw std::invalid_argument("ppo_train: total_steps must be >= 0");

  TrainResult result;
  result.spec = ppo_network(config, prototype);
  const auto& spec = result.spec;
  result.params = nn::init_params(spec, derive_seed(seed, 0));
  auto& params = result.params;
  optim::Optimizer opt(config.optimizer, params.size());
  Rng action_rng(derive_seed(seed, 1));
  Rng shuffle_rng(derive_seed(seed, 2));
  const std::uint64_t eval_root = derive_seed(seed, 3);

  const std::size_t n_envs = config.num_envs;
  const std::size_t obs_dim = prototype.observation_dim();
  std::vector<std::unique_ptr<envs::Environment>> envs;
  std::vector<std::uint64_t> episode_roots(n_envs);
  std::vector<std::uint64_t> episode_counts(n_envs, 0);
  std::vector<double> episode_returns(n_envs, 0.0);
  nn::Matrix obs(n_envs, obs_dim);
  for (std::size_t e = 0; e < n_envs; ++e) {
    envs.push_back(prototype.clone());
    episode_roots[e] = derive_seed(seed, 100 + e);
    const auto o = envs[e]->reset(derive_seed(episode_roots[e], episode_counts[e]++));
    std::copy(o.begin(), o.end(), obs.row(e).begin());
  }

  const GreedyPolicy greedy = [&](std::span<const double> o) {
    nn::Matrix in(1, obs_dim);
    std::copy(o.begin(), o.end(), in.data.begin());
    const auto out = nn::forward(spec, params, in);
    return nn::argmax(out.logits.row(0));
  };
  std::int64_t evals_done = 0;
  bool stop = false;
  auto maybe_evaluate = [&](std::int64_t env_steps) {
    if (config.eval_interval <= 0) return;
    while ((evals_done + 1) * config.eval_interval <= env_steps) {
      ++evals_done;
      result.evaluations.push_back(
          {evals_done * config.eval_interval,
           evaluate_greedy(prototype, greedy,
                           derive_seed(eval_root, static_cast<std::uint64_t>(evals_done)))});
      if (config.stop_return && result.evaluations.back().value >= *config.stop_return)
        stop = true;
    }
  };

  const std::size_t batch_n = config.batch_size();
  const std::int64_t iterations = total_steps / static_cast<std::int64_t>(batch_n);
  const std::size_t mb_size = config.minibatch_size();
  EpisodeAccumulator finished;
  std::int64_t env_steps = 0;
  std::int64_t update_index = 0;
  std::vector<std::size_t> order(batch_n);

  for (std::int64_t it = 0; it < iterations && !stop; ++it) {
    RolloutBatch batch(config.rollout_steps, n_envs, obs_dim);
    for (std::size_t t = 0; t < config.rollout_steps; ++t) {
      const auto heads = nn::forward(spec, params, obs);
      for (std::size_t e = 0; e < n_envs; ++e) {
        const std::size_t i = t * n_envs + e;
        std::copy(obs.row(e).begin(), obs.row(e).end(), batch.observations.row(i).begin());
        const auto sample = nn::softmax_categorical(heads.logits.row(e), action_rng);
        batch.actions[i] = sample.action;
        batch.log_probs[i] = sample.log_prob;
        batch.values[i] = heads.values[e];

        auto out = envs[e]->step(sample.action);
        batch.rewards[i] = out.reward;
        batch.dones[i] = out.done ? 1.0 : 0.0;
        episode_returns[e] += out.reward;
        if (out.done) {
          result.episodes.push_back({env_steps + static_cast<std::int64_t>(e) + 1,
                                     episode_returns[e]});
          finished.add(episode_returns[e]);
          episode_returns[e] = 0.0;
          out.observation =
              envs[e]->reset(derive_seed(episode_roots[e], episode_counts[e]++));
        }
        std::copy(out.observation.begin(), out.observation.end(), obs.row(e).begin());
      }
      env_steps += static_cast<std::int64_t>(n_envs);
      maybe_evaluate(env_steps);
    }

    const auto next = nn::forward(spec, params, obs);
    auto gae = compute_gae(batch.rewards, batch.values, batch.dones, next.values, n_envs,
                           config.gamma, config.gae_lambda);
    batch.advantages = std::move(gae.advantages);
    batch.returns = std::move(gae.returns);

    // One boundary per collected batch, before the epoch loop.
    opt.notify_boundary();

    std::int64_t pos = 0;
    for (std::size_t epoch = 0; epoch < config.num_epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t k = batch_n; k > 1; --k) std::swap(order[k - 1], order[shuffle_rng.below(k)]);
      for (std::size_t mb = 0; mb < config.num_minibatches; ++mb) {
        const std::span<const std::size_t> idx(order.data() + mb * mb_size, mb_size);
        try {
          const auto loss = ppo_loss(spec, params, batch, idx, config);
          const auto step = opt.step(loss.grads, params.values);
          telemetry::MetricsRow row;
          row.record = {update_index, it, pos, step.pre_clip_grad_norm, step.update_norm,
                        step.max_abs_update,
                        static_cast<std::int64_t>(opt.state().t_local)};
          row.episode_return = finished.take();
          result.metrics.push_back(row);
        } catch (const PoisonedGradientError& err) {
          throw PoisonedGradientError("ppo_train: iteration " + std::to_string(it) +
                                      ", epoch " + std::to_string(epoch) + ", minibatch " +
                                      std::to_string(mb) + ": " + err.what());
        }
        ++update_index;
        ++pos;
      }
    }
  }

  result.optimizer_state = opt.state();
  result.env_steps = env_steps;
  return result;
}

}  // namespace adamrel::rl
