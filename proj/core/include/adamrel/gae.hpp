// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace adamrel::rl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Generalized advantage estimation over a (steps x envs) rollout stored
/// step-major (index t * envs + e). dones[t * envs + e] is 1 when the episode
/// of env e ended at step t, which masks both the bootstrap and the
/// recursion:
///
///   delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
///   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
///
/// next_values holds V of the state after the last step, one per env.
/// Throws std::invalid_argument on shape mismatches and
/// PoisonedGradientError on non-finite inputs.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const double> dones,
                      std::span<const double> next_values, std::size_t envs,
                      double gamma, double lambda);

}  // namespace adamrel::rl
