// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adamrel/envs.hpp"
#include "adamrel/optimizer.hpp"
#include "adamrel/tensor_nn.hpp"
#include "adamrel/training.hpp"

namespace adamrel::rl {

struct PpoConfig {
  std::size_t num_envs = 8;
  std::size_t rollout_steps = 128;
  std::size_t num_epochs = 4;
  std::size_t num_minibatches = 4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.1;
  bool value_clip = true;
  bool normalize_advantages = true;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::vector<std::size_t> hidden{64, 64};
  nn::Activation activation = nn::Activation::Tanh;
  optim::OptimizerConfig optimizer;
  /// Greedy evaluation cadence in environment steps (0 disables).
  std::int64_t eval_interval = 0;
  /// Stop after the first evaluation scoring at least this return.
  std::optional<double> stop_return;

  void validate() const;
  std::size_t batch_size() const { return num_envs * rollout_steps; }
  std::size_t minibatch_size() const { return batch_size() / num_minibatches; }
};

/// On-policy storage, step-major (index t * num_envs + e).
struct RolloutBatch {
  std::size_t steps = 0;
  std::size_t envs = 0;
  std::size_t obs_dim = 0;
  nn::Matrix observations;  // (steps * envs) x obs_dim
  std::vector<std::size_t> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> dones;
  std::vector<double> values;
  std::vector<double> advantages;
  std::vector<double> returns;

  RolloutBatch(std::size_t steps, std::size_t envs, std::size_t obs_dim);
  std::size_t size() const noexcept { return steps * envs; }
};

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A) for one sample.
double clipped_surrogate(double ratio, double advantage, double clip_eps);

/// Derivative of clipped_surrogate with respect to ratio: A where the
/// unclipped term is the active minimum, otherwise 0.
double clipped_surrogate_grad(double ratio, double advantage, double clip_eps);

/// (x - mean) / max(std, 1e-8) with the population standard deviation.
std::vector<double> normalize_advantages(std::span<const double> advantages);

struct PpoLoss {
  double loss = 0.0;
  double actor_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  std::vector<double> grads;
};

/// Joint actor-critic loss on the rows `indices` of `batch`:
///
///   -mean(clip objective) + value_coef * mean(value error^2)
///   - entropy_coef * mean(entropy)
///
/// With value_clip the squared error is the larger of the unclipped error
/// and the error of the prediction clipped to within clip_eps of the
/// rollout value. Gradient is w.r.t. the flat parameters of a Dual-head net.
/// Throws PoisonedGradientError if the loss is not finite.
PpoLoss ppo_loss(const nn::MlpSpec& spec, const nn::FlatParams& params,
                 const RolloutBatch& batch, std::span<const std::size_t> indices,
                 const PpoConfig& config);

/// Actor-critic network used by ppo_train for this environment.
nn::MlpSpec ppo_network(const PpoConfig& config, const envs::Environment& env);

/// PPO with the optimizer's boundary hook called once per collected batch,
/// after collection and before the first epoch. `total_steps` counts
/// environment steps; it is rounded down to whole batches.
///
/// Seed streams (see derive_seed): 0 parameters, 1 action sampling,
/// 2 minibatch shuffling, 3 evaluation, 100 + e episode seeds of env e.
TrainResult ppo_train(const envs::Environment& prototype, const PpoConfig& config,
                      std::int64_t total_steps, std::uint64_t seed);

}  // namespace adamrel::rl
