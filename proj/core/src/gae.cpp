// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/gae.hpp"

#include <cmath>
#include <stdexcept>

#include "adamrel/errors.hpp"

namespace adamrel::rl {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const double> dones, std::span<const double> next_values,
                      std::size_t envs, double gamma, double lambda) {
  if (envs == 0) throw std::invalid_argument("gae: envs must be >= 1");
  if (rewards.size() % envs != 0 || values.size() != rewards.size() ||
      dones.size() != rewards.size() || next_values.size() != envs)
    throw std::invalid_argument("gae: inconsistent shapes");
  auto finite = [](std::span<const double> xs) {
    for (double x : xs)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!finite(rewards) || !finite(values) || !finite(dones) || !finite(next_values))
    throw PoisonedGradientError("gae: non-finite input");

  const std::size_t steps = rewards.size() / envs;
  GaeResult out;
  out.advantages.assign(rewards.size(), 0.0);
  out.returns.assign(rewards.size(), 0.0);
  for (std::size_t e = 0; e < envs; ++e) {
    double next_adv = 0.0;
    double next_value = next_values[e];
    for (std::size_t t = steps; t-- > 0;) {
      const std::size_t i = t * envs + e;
      const double live = 1.0 - dones[i];
      const double delta = rewards[i] + gamma * next_value * live - values[i];
      next_adv = delta + gamma * lambda * live * next_adv;
      out.advantages[i] = next_adv;
      out.returns[i] = next_adv + values[i];
      next_value = values[i];
    }
  }
  return out;
}

}  // namespace adamrel::rl
