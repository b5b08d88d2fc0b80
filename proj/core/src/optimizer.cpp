// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/optimizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adamrel/errors.hpp"

namespace adamrel::optim {

namespace {

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double x) { return std::isfinite(x); });
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::Adam: return "Adam";
    case Variant::AdamRel: return "AdamRel";
    case Variant::AdamMR: return "AdamMR";
    case Variant::AdamEqBetas: return "AdamEqBetas";
  }
  return "Adam";
}

Variant parse_variant(std::string_view name) {
  const std::string key = lower(name);
  if (key == "adam") return Variant::Adam;
  if (key == "adamrel" || key == "adam-rel") return Variant::AdamRel;
  if (key == "adammr" || key == "adam-mr") return Variant::AdamMR;
  if (key == "adameqbetas" || key == "adam-eq-betas") return Variant::AdamEqBetas;
  throw std::invalid_argument("unknown optimizer variant '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("optimizer: alpha must be positive and finite");
  if (!(beta1 >= 0.0 && beta1 < 1.0))
    throw std::invalid_argument("optimizer: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("optimizer: beta2 must lie in [0, 1)");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("optimizer: eps must be nonnegative and finite");
  if (max_grad_norm && !(*max_grad_norm > 0.0))
    throw std::invalid_argument("optimizer: max_grad_norm must be positive");
  if (variant == Variant::AdamEqBetas && beta1 != beta2)
    throw std::invalid_argument("optimizer: AdamEqBetas requires beta1 == beta2");
}

OptimizerConfig OptimizerConfig::rl_defaults(Variant variant, double alpha,
                                             std::optional<double> max_grad_norm) {
  OptimizerConfig config;
  config.alpha = alpha;
  config.eps = 1e-5;
  config.variant = variant;
  config.max_grad_norm = max_grad_norm;
  if (variant == Variant::AdamEqBetas) config.beta2 = config.beta1;
  return config;
}

OptimizerState init_state(std::size_t param_count) {
  if (param_count == 0)
    throw std::invalid_argument("init_state: param_count must be at least 1");
  OptimizerState state;
  state.m.assign(param_count, 0.0);
  state.v.assign(param_count, 0.0);
  return state;
}

double global_norm(std::span<const double> values) noexcept {
  double sum = 0.0;
  for (double x : values) sum += x * x;
  return std::sqrt(sum);
}

std::vector<double> clip_global_norm(std::span<const double> grads, double max_norm) {
  if (!(max_norm > 0.0))
    throw std::invalid_argument("clip_global_norm: max_norm must be positive");
  if (!all_finite(grads))
    throw PoisonedGradientError("clip_global_norm: non-finite gradient entry");
  std::vector<double> out(grads.begin(), grads.end());
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

StepResult step(OptimizerState& state, std::span<const double> grads,
                const OptimizerConfig& config, std::span<double> params) {
  const std::size_t n = state.m.size();
  if (grads.size() != n || params.size() != n || state.v.size() != n) {
    throw std::invalid_argument("optimizer step: length mismatch (state " +
                                std::to_string(n) + ", grads " +
                                std::to_string(grads.size()) + ", params " +
                                std::to_string(params.size()) + ")");
  }
  config.validate();
  if (!all_finite(grads)) {
    std::size_t bad = 0;
    while (bad < n && std::isfinite(grads[bad])) ++bad;
    throw PoisonedGradientError("optimizer step: non-finite gradient at index " +
                                std::to_string(bad));
  }

  StepResult result;
  result.pre_clip_grad_norm = global_norm(grads);

  std::vector<double> clipped;
  std::span<const double> g = grads;
  if (config.max_grad_norm && result.pre_clip_grad_norm > *config.max_grad_norm) {
    const double scale = *config.max_grad_norm / result.pre_clip_grad_norm;
    clipped.assign(grads.begin(), grads.end());
    for (double& x : clipped) x *= scale;
    g = clipped;
  }

  state.t_local += 1;
  state.steps_total += 1;
  const double t = static_cast<double>(state.t_local);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  const double a1 = 1.0 - config.beta1;
  const double a2 = 1.0 - config.beta2;

  result.update.resize(n);
  double sq = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = config.beta1 * state.m[i] + a1 * g[i];
    state.v[i] = config.beta2 * state.v[i] + a2 * (g[i] * g[i]);
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    const double denom = std::sqrt(v_hat) + config.eps;
    // v == 0 with eps == 0 means every gradient so far was 0, so m == 0 too.
    const double u = denom > 0.0 ? -config.alpha * (m_hat / denom) : 0.0;
    result.update[i] = u;
    params[i] += u;
    sq += u * u;
    max_abs = std::max(max_abs, std::abs(u));
  }
  result.update_norm = std::sqrt(sq);
  result.max_abs_update = max_abs;
  return result;
}

void notify_boundary(OptimizerState& state, const OptimizerConfig& config) {
  switch (config.variant) {
    case Variant::Adam:
    case Variant::AdamEqBetas:
      return;
    case Variant::AdamRel:
      state.t_local = 0;
      return;
    case Variant::AdamMR:
      state.t_local = 0;
      std::fill(state.m.begin(), state.m.end(), 0.0);
      std::fill(state.v.begin(), state.v.end(), 0.0);
      return;
  }
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t param_count)
    : config_(std::move(config)), state_(init_state(param_count)) {
  config_.validate();
}

}  // namespace adamrel::optim
