// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>
#include <string>

#include "adamrel/envs.hpp"

namespace adamrel::envs {

void RegressionSwitchConfig::validate() const {
  if (input_dim < 1) throw std::invalid_argument("regression: input_dim must be >= 1");
  if (phase_length < 1) throw std::invalid_argument("regression: phase_length must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("regression: batch_size must be >= 1");
  if (target_scale_schedule.empty())
    throw std::invalid_argument("regression: empty target scale schedule");
  for (double s : target_scale_schedule)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("regression: scales must be positive");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("regression: noise_std must be >= 0");
}

std::vector<double> regression_teacher(const RegressionSwitchConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.task_seed, 0));
  std::vector<double> w(config.input_dim);
  for (double& x : w) x = rng.normal() / std::sqrt(static_cast<double>(config.input_dim));
  return w;
}

RegressionBatch regression_batch(const RegressionSwitchConfig& config,
                                 std::size_t phase_index, Rng& rng) {
  config.validate();
  if (phase_index >= config.target_scale_schedule.size()) {
    throw std::invalid_argument("regression: phase " + std::to_string(phase_index) +
                                " is past the schedule");
  }
  const auto teacher = regression_teacher(config);
  const double scale = config.target_scale_schedule[phase_index];
  RegressionBatch batch;
  batch.inputs = nn::Matrix(config.batch_size, config.input_dim);
  batch.targets.resize(config.batch_size);
  for (std::size_t r = 0; r < config.batch_size; ++r) {
    double y = 0.0;
    for (std::size_t i = 0; i < config.input_dim; ++i) {
      const double x = rng.normal();
      batch.inputs(r, i) = x;
      y += teacher[i] * x;
    }
    batch.targets[r] = scale * y + (config.noise_std > 0.0 ? config.noise_std * rng.normal() : 0.0);
  }
  return batch;
}

}  // namespace adamrel::envs
