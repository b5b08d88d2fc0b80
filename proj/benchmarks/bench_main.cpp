// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "adamrel/gae.hpp"
#include "adamrel/optimizer.hpp"
#include "adamrel/rng.hpp"
#include "adamrel/tensor_nn.hpp"
#include "adamrel/theory.hpp"

namespace {

using namespace adamrel;

void BM_OptimizerStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  optim::OptimizerConfig c;
  c.variant = optim::Variant::AdamRel;
  c.max_grad_norm = 0.5;
  optim::Optimizer opt(c, n);
  std::vector<double> p(n, 0.0), g(n);
  Rng rng(1);
  for (auto& x : g) x = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(opt.step(g, p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_OptimizerStep)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);

nn::MlpSpec ppo_sized_net() {
  return {{25, 64, 64, 5}, nn::Activation::Tanh, nn::OutputHead::dual(4)};
}

void BM_MlpForward(benchmark::State& state) {
  const auto spec = ppo_sized_net();
  const auto params = nn::init_params(spec, 1);
  nn::Matrix x(static_cast<std::size_t>(state.range(0)), spec.input_dim());
  Rng rng(2);
  for (auto& v : x.data) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward(spec, params, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(256);

void BM_MlpBackward(benchmark::State& state) {
  const auto spec = ppo_sized_net();
  const auto params = nn::init_params(spec, 1);
  const auto rows = static_cast<std::size_t>(state.range(0));
  nn::Matrix x(rows, spec.input_dim());
  Rng rng(3);
  for (auto& v : x.data) v = rng.normal();
  nn::HeadGrads up{nn::Matrix(rows, 4, 0.1), std::vector<double>(rows, 0.2)};
  const auto trace = nn::forward_trace(spec, params, x);
  for (auto _ : state) benchmark::DoNotOptimize(nn::backward(spec, params, trace, up));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpBackward)->Arg(1)->Arg(256);

void BM_Gae(benchmark::State& state) {
  const std::size_t steps = 128, envs = 8;
  Rng rng(4);
  std::vector<double> r(steps * envs), v(steps * envs), d(steps * envs), next(envs);
  for (auto& x : r) x = rng.normal();
  for (auto& x : v) x = rng.normal();
  for (auto& x : d) x = rng.uniform() < 0.02 ? 1.0 : 0.0;
  for (auto& x : next) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(rl::compute_gae(r, v, d, next, envs, 0.99, 0.95));
}
BENCHMARK(BM_Gae);

void BM_StepGradientSimulation(benchmark::State& state) {
  theory::StepGradientScenario s;
  s.k = 10.0;
  s.t_prime = state.range(0);
  s.t_max = 100;
  for (auto _ : state)
    benchmark::DoNotOptimize(theory::simulate_step_gradient(s, optim::Variant::AdamRel));
}
BENCHMARK(BM_StepGradientSimulation)->Arg(5000)->Arg(20000);

void BM_AdamRelLimitGrid(benchmark::State& state) {
  for (auto _ : state) {
    double best = 0.0;
    for (int i = 0; i < 100; ++i)
      for (std::int64_t t = 0; t <= 100; ++t)
        best = std::max(best, theory::adamrel_limit_update(1.0 + i, t));
    benchmark::DoNotOptimize(best);
  }
}
BENCHMARK(BM_AdamRelLimitGrid);

}  // namespace

BENCHMARK_MAIN();
