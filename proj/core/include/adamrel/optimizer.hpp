// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace adamrel::optim {

/// Which timestep/moment semantics apply at an objective boundary.
///
///  - Adam:        boundaries are ignored.
///  - AdamRel:     the bias-correction timestep restarts at 0; moments kept.
///  - AdamMR:      timestep and both moment estimates restart at 0.
///  - AdamEqBetas: plain Adam constrained to beta1 == beta2.
enum class Variant { Adam, AdamRel, AdamMR, AdamEqBetas };

std::string_view to_string(Variant variant) noexcept;

/// Accepts the canonical names above, case-insensitively. Throws
/// std::invalid_argument otherwise.
Variant parse_variant(std::string_view name);

struct OptimizerConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Variant variant = Variant::Adam;
  /// Global L2-norm clipping threshold applied before the moment update.
  std::optional<double> max_grad_norm;

  /// Throws std::invalid_argument unless alpha > 0, betas in [0, 1), eps >= 0,
  /// max_grad_norm (if set) > 0, and beta1 == beta2 for AdamEqBetas.
  void validate() const;

  /// Conventions common in RL code: eps = 1e-5 and optional clipping.
  static OptimizerConfig rl_defaults(Variant variant, double alpha,
                                     std::optional<double> max_grad_norm);
};

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  /// Bias-correction timestep; the quantity a relative-timestep reset zeroes.
  std::uint64_t t_local = 0;
  /// Lifetime number of steps. Diagnostics only.
  std::uint64_t steps_total = 0;

  std::size_t size() const noexcept { return m.size(); }
  bool operator==(const OptimizerState&) const = default;
};

struct StepResult {
  /// Delta applied to the parameters (already multiplied by -alpha).
  std::vector<double> update;
  double pre_clip_grad_norm = 0.0;
  double update_norm = 0.0;
  double max_abs_update = 0.0;
};

/// Zero moments and counters. Throws std::invalid_argument if
/// param_count == 0.
OptimizerState init_state(std::size_t param_count);

/// Euclidean norm of a vector.
double global_norm(std::span<const double> values) noexcept;

/// Returns grads scaled by max_norm / ||grads|| when the norm exceeds
/// max_norm, otherwise a copy. Throws PoisonedGradientError on non-finite
/// input and std::invalid_argument if max_norm <= 0.
std::vector<double> clip_global_norm(std::span<const double> grads,
                                     double max_norm);

/// One Adam-family update, in place on `params` and `state`.
///
/// Clipping (if configured) happens before the moment update. The timestep is
/// incremented before use, so the first correction divides by 1 - beta^1.
/// Update = -alpha * m_hat / (sqrt(v_hat) + eps).
///
/// Throws PoisonedGradientError for non-finite gradients and
/// std::invalid_argument for length mismatches; in both cases nothing is
/// modified.
StepResult step(OptimizerState& state, std::span<const double> grads,
                const OptimizerConfig& config, std::span<double> params);

/// Objective-boundary hook. No-op for Adam and AdamEqBetas, resets t_local for
/// AdamRel, and resets t_local, m and v for AdamMR. steps_total is kept.
void notify_boundary(OptimizerState& state, const OptimizerConfig& config);

/// Config plus state, for callers that own one optimizer per parameter
/// vector.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t param_count);

  StepResult step(std::span<const double> grads, std::span<double> params) {
    return optim::step(state_, grads, config_, params);
  }
  void notify_boundary() { optim::notify_boundary(state_, config_); }

  const OptimizerConfig& config() const noexcept { return config_; }
  const OptimizerState& state() const noexcept { return state_; }
  OptimizerState& mutable_state() noexcept { return state_; }

 private:
  OptimizerConfig config_;
  OptimizerState state_;
};

}  // namespace adamrel::optim
