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
#include "adamrel/replay_buffer.hpp"
#include "adamrel/tensor_nn.hpp"
#include "adamrel/training.hpp"

namespace adamrel::rl {

struct DqnConfig {
  std::size_t buffer_capacity = 50000;
  std::size_t batch_size = 32;
  /// Environment steps between target refreshes (hard) or optimizer
  /// boundary notifications (Polyak).
  std::int64_t target_update_interval = 1000;
  /// Soft target updates after every optimizer step when set.
  std::optional<double> polyak_tau;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  double exploration_fraction = 0.1;
  std::int64_t learning_starts = 1000;
  std::int64_t train_frequency = 4;
  std::vector<std::size_t> hidden{64, 64};
  nn::Activation activation = nn::Activation::ReLU;
  optim::OptimizerConfig optimizer;
  std::int64_t eval_interval = 0;
  /// Stop after the first evaluation scoring at least this return.
  std::optional<double> stop_return;

  void validate() const;
};

/// Uniform random action with probability epsilon, otherwise the argmax
/// (lowest index on ties).
std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng);

/// Linear decay from start to end over `duration` steps, then constant.
double linear_schedule(double start, double end, double duration, double step);

/// r + gamma * max_a q_next(a) * (1 - done), per row of q_next.
std::vector<double> td_targets(std::span<const double> rewards,
                               const nn::Matrix& q_next,
                               std::span<const unsigned char> dones, double gamma);

struct DqnLoss {
  double loss = 0.0;
  std::vector<double> grads;
};

/// mean((Q(s, a) - target)^2) over a batch and its gradient w.r.t. the
/// online parameters. Targets are constants (no gradient flows into them).
DqnLoss dqn_loss(const nn::MlpSpec& spec, const nn::FlatParams& online,
                 const nn::Matrix& obs, std::span<const std::size_t> actions,
                 std::span<const double> targets);

/// target <- (1 - tau) * target + tau * online.
void polyak_update(std::span<double> target, std::span<const double> online, double tau);

nn::MlpSpec dqn_network(const DqnConfig& config, const envs::Environment& env);

/// Vanilla DQN. In hard-target mode every target_update_interval environment
/// steps the online parameters are copied into the target network and the
/// optimizer boundary hook fires. In Polyak mode the target moves after
/// every optimizer step and the hook fires on the same interval.
///
/// Seed streams: 0 parameters, 1 exploration, 2 replay sampling,
/// 3 evaluation, 100 episode seeds.
TrainResult dqn_train(const envs::Environment& prototype, const DqnConfig& config,
                      std::int64_t total_steps, std::uint64_t seed);

}  // namespace adamrel::rl
