// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "adamrel/optimizer.hpp"

namespace adamrel::theory {

/// Scalar gradient stream: `t_prime` steps of g followed by steps of k * g.
/// Post-change steps are indexed t = 0, 1, ...
struct StepGradientScenario {
  double g = 1.0;
  double k = 1.0;
  std::int64_t t_prime = 20000;
  std::int64_t t_max = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;

  void validate() const;
};

struct CurvePoint {
  std::int64_t t = 0;
  double update_size = 0.0;
};

struct UpdateCurve {
  optim::Variant variant = optim::Variant::Adam;
  double k = 1.0;
  std::vector<CurvePoint> points;
};

/// Limit of the Adam update ratio m_hat / sqrt(v_hat) at post-change step t,
/// as the pre-change history grows without bound (eps = 0):
///
///   (b1^(t+1) + k (1 - b1^(t+1))) / sqrt(b2^(t+1) + k^2 (1 - b2^(t+1)))
///
/// Throws std::invalid_argument for k <= 0, t < 0 or betas outside [0, 1).
double adam_limit_update(double k, std::int64_t t, double beta1 = 0.9,
                         double beta2 = 0.999);

/// The same limit when the timestep is reset right before the change:
/// adam_limit_update scaled by sqrt(1 - b2^(t+1)) / (1 - b1^(t+1)).
double adamrel_limit_update(double k, std::int64_t t, double beta1 = 0.9,
                            double beta2 = 0.999);

/// sqrt(1 - b2^(t+1)) / (1 - b1^(t+1)).
double adamrel_prefactor(std::int64_t t, double beta1, double beta2);

/// Supremum over k > 0 of adam_limit_update(k, 0):
/// sqrt(b1^2 / b2 + (1 - b1)^2 / (1 - b2)).
double adam_peak_bound(double beta1, double beta2);

/// Runs the optimizer recurrences (eps = 0, alpha = 1) on the scenario's
/// scalar gradient stream and returns |u_t| for t = 0..t_max. AdamRel resets
/// the timestep, AdamMR resets timestep and moments, immediately before the
/// first post-change step. AdamEqBetas behaves as Adam with the scenario's
/// betas.
UpdateCurve simulate_step_gradient(const StepGradientScenario& scenario,
                                   optim::Variant variant);

/// Closed-form curves for every (variant, k) pair, variant-major. Only Adam
/// and AdamRel have closed forms here; other variants throw
/// std::invalid_argument, as does an empty k list.
std::vector<UpdateCurve> emit_update_curves(std::span<const double> k_values,
                                            std::int64_t t_max, double beta1,
                                            double beta2,
                                            std::span<const optim::Variant> variants);

/// CSV with header `variant,k,t,update_size`, 17 significant digits.
void write_curves_csv(std::ostream& out, std::span<const UpdateCurve> curves);

namespace detail {

/// Finite-history form of the Adam update ratio at post-change step t after
/// t_prime pre-change steps (before taking the limit):
///
///   sqrt(1 - b2^(t'+t+1)) / (1 - b1^(t'+t+1))
///     * (b1^(t+1) (1 - b1^t') + k (1 - b1^(t+1)))
///     / sqrt(b2^(t+1) (1 - b2^t') + k^2 (1 - b2^(t+1)))
double adam_finite_history_update(double k, std::int64_t t,
                                  std::int64_t t_prime, double beta1,
                                  double beta2);

}  // namespace detail

}  // namespace adamrel::theory
