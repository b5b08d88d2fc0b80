// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "adamrel/envs.hpp"
#include "adamrel/optimizer.hpp"
#include "adamrel/telemetry.hpp"
#include "adamrel/tensor_nn.hpp"

namespace adamrel::rl {

struct EpisodeReturn {
  std::int64_t env_step = 0;
  double value = 0.0;
};

/// Greedy-policy evaluation taken during training.
struct EvalPoint {
  std::int64_t env_step = 0;
  double value = 0.0;
};

struct TrainResult {
  nn::MlpSpec spec;
  nn::FlatParams params;
  optim::OptimizerState optimizer_state;
  std::vector<telemetry::MetricsRow> metrics;
  std::vector<EpisodeReturn> episodes;
  std::vector<EvalPoint> evaluations;
  std::int64_t env_steps = 0;
};

/// Maps one observation to the action a greedy policy takes.
using GreedyPolicy = std::function<std::size_t(std::span<const double>)>;

/// Return of one greedy episode on a fresh clone of `prototype`, capped at
/// max_steps moves.
double evaluate_greedy(const envs::Environment& prototype, const GreedyPolicy& policy,
                       std::uint64_t seed, int max_steps = 100000);

/// Collects the episode returns that finished since the previous optimizer
/// step so they can be attached to the next metrics row.
class EpisodeAccumulator {
 public:
  void add(double value) {
    sum_ += value;
    ++count_;
  }
  std::optional<double> take() {
    if (count_ == 0) return std::nullopt;
    double mean = sum_ / static_cast<double>(count_);
    sum_ = 0.0;
    count_ = 0;
    return mean;
  }

 private:
  double sum_ = 0.0;
  std::int64_t count_ = 0;
};

}  // namespace adamrel::rl
