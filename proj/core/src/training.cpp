// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/training.hpp"

namespace adamrel::rl {

double evaluate_greedy(const envs::Environment& prototype, const GreedyPolicy& policy,
                       std::uint64_t seed, int max_steps) {
  auto env = prototype.clone();
  auto obs = env->reset(seed);
  double total = 0.0;
  for (int i = 0; i < max_steps; ++i) {
    auto out = env->step(policy(obs));
    total += out.reward;
    if (out.done) break;
    obs = std::move(out.observation);
  }
  return total;
}

}  // namespace adamrel::rl
