// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/regression_fit.hpp"

#include "adamrel/rng.hpp"
#include "adamrel/tensor_nn.hpp"

namespace adamrel::rl {

std::vector<telemetry::StepRecord> fit_regression_switch(
    const envs::RegressionSwitchConfig& task, const optim::OptimizerConfig& optimizer,
    std::uint64_t seed) {
  task.validate();
  nn::MlpSpec spec{{task.input_dim, 1}, nn::Activation::Tanh, nn::OutputHead::scalar()};
  auto params = nn::make_params(spec);
  optim::Optimizer opt(optimizer, params.size());
  Rng rng(derive_seed(seed, 0));

  std::vector<telemetry::StepRecord> records;
  records.reserve(task.target_scale_schedule.size() * task.phase_length);
  const double inv_b = 1.0 / static_cast<double>(task.batch_size);
  std::int64_t step_index = 0;
  for (std::size_t phase = 0; phase < task.target_scale_schedule.size(); ++phase) {
    if (phase > 0) opt.notify_boundary();
    for (std::size_t pos = 0; pos < task.phase_length; ++pos) {
      const auto batch = envs::regression_batch(task, phase, rng);
      const auto trace = nn::forward_trace(spec, params, batch.inputs);
      const auto& pred = trace.activations.back();
      // loss = mean(0.5 * residual^2)
      nn::HeadGrads upstream;
      upstream.d_values.resize(task.batch_size);
      for (std::size_t r = 0; r < task.batch_size; ++r)
        upstream.d_values[r] = (pred(r, 0) - batch.targets[r]) * inv_b;
      const auto grads = nn::backward(spec, params, trace, upstream);
      const auto res = opt.step(grads, params.values);
      records.push_back({step_index++, static_cast<std::int64_t>(phase),
                         static_cast<std::int64_t>(pos), res.pre_clip_grad_norm,
                         res.update_norm, res.max_abs_update,
                         static_cast<std::int64_t>(opt.state().t_local)});
    }
  }
  return records;
}

}  // namespace adamrel::rl
