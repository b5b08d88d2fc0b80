// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adamrel/io.hpp"

namespace adamrel::theory {

namespace {

void check_betas(double beta1, double beta2) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("theory: betas must lie in [0, 1)");
}

void check_args(double k, std::int64_t t, double beta1, double beta2) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("theory: k must be positive and finite");
  if (t < 0) throw std::invalid_argument("theory: t must be nonnegative");
  check_betas(beta1, beta2);
}

}  // namespace

void StepGradientScenario::validate() const {
  if (!(g > 0.0) || !std::isfinite(g))
    throw std::invalid_argument("scenario: g must be positive");
  if (!(k > 0.0) || !std::isfinite(k))
    throw std::invalid_argument("scenario: k must be positive");
  if (t_prime < 1) throw std::invalid_argument("scenario: t_prime must be >= 1");
  if (t_max < 0) throw std::invalid_argument("scenario: t_max must be >= 0");
  check_betas(beta1, beta2);
}

double adam_limit_update(double k, std::int64_t t, double beta1, double beta2) {
  check_args(k, t, beta1, beta2);
  const double e = static_cast<double>(t + 1);
  const double p1 = std::pow(beta1, e);
  const double p2 = std::pow(beta2, e);
  return (p1 + k * (1.0 - p1)) / std::sqrt(p2 + k * k * (1.0 - p2));
}

double adamrel_prefactor(std::int64_t t, double beta1, double beta2) {
  if (t < 0) throw std::invalid_argument("theory: t must be nonnegative");
  check_betas(beta1, beta2);
  const double e = static_cast<double>(t + 1);
  return std::sqrt(1.0 - std::pow(beta2, e)) / (1.0 - std::pow(beta1, e));
}

double adamrel_limit_update(double k, std::int64_t t, double beta1, double beta2) {
  return adamrel_prefactor(t, beta1, beta2) * adam_limit_update(k, t, beta1, beta2);
}

double adam_peak_bound(double beta1, double beta2) {
  check_betas(beta1, beta2);
  const double a = 1.0 - beta1;
  return std::sqrt(beta1 * beta1 / beta2 + a * a / (1.0 - beta2));
}

UpdateCurve simulate_step_gradient(const StepGradientScenario& scenario,
                                   optim::Variant variant) {
  scenario.validate();
  optim::OptimizerConfig config;
  config.alpha = 1.0;
  config.eps = 0.0;
  config.beta1 = scenario.beta1;
  config.beta2 = scenario.beta2;
  config.variant = variant == optim::Variant::AdamEqBetas ? optim::Variant::Adam : variant;

  optim::OptimizerState state = optim::init_state(1);
  double param = 0.0;
  const double pre[1] = {scenario.g};
  for (std::int64_t i = 0; i < scenario.t_prime; ++i)
    optim::step(state, pre, config, std::span<double>(&param, 1));

  optim::notify_boundary(state, config);

  UpdateCurve curve;
  curve.variant = variant;
  curve.k = scenario.k;
  curve.points.reserve(static_cast<std::size_t>(scenario.t_max + 1));
  const double post[1] = {scenario.k * scenario.g};
  for (std::int64_t t = 0; t <= scenario.t_max; ++t) {
    const auto result = optim::step(state, post, config, std::span<double>(&param, 1));
    curve.points.push_back({t, std::abs(result.update[0])});
  }
  return curve;
}

std::vector<UpdateCurve> emit_update_curves(std::span<const double> k_values,
                                            std::int64_t t_max, double beta1,
                                            double beta2,
                                            std::span<const optim::Variant> variants) {
  if (k_values.empty()) throw std::invalid_argument("emit_update_curves: no k values");
  if (t_max < 0) throw std::invalid_argument("emit_update_curves: t_max must be >= 0");
  std::vector<UpdateCurve> curves;
  for (const auto variant : variants) {
    if (variant != optim::Variant::Adam && variant != optim::Variant::AdamRel) {
      throw std::invalid_argument("emit_update_curves: no closed form for variant " +
                                  std::string(optim::to_string(variant)));
    }
    for (double k : k_values) {
      UpdateCurve curve;
      curve.variant = variant;
      curve.k = k;
      curve.points.reserve(static_cast<std::size_t>(t_max + 1));
      for (std::int64_t t = 0; t <= t_max; ++t) {
        const double u = variant == optim::Variant::Adam
                             ? adam_limit_update(k, t, beta1, beta2)
                             : adamrel_limit_update(k, t, beta1, beta2);
        curve.points.push_back({t, u});
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

void write_curves_csv(std::ostream& out, std::span<const UpdateCurve> curves) {
  out << "variant,k,t,update_size\n";
  for (const auto& curve : curves) {
    const std::string k = io::format_double(curve.k);
    for (const auto& p : curve.points) {
      out << optim::to_string(curve.variant) << ',' << k << ',' << p.t << ','
          << io::format_double(p.update_size) << '\n';
    }
  }
}

namespace detail {

double adam_finite_history_update(double k, std::int64_t t, std::int64_t t_prime,
                                  double beta1, double beta2) {
  check_args(k, t, beta1, beta2);
  if (t_prime < 1) throw std::invalid_argument("theory: t_prime must be >= 1");
  const double e = static_cast<double>(t + 1);
  const double total = static_cast<double>(t_prime + t + 1);
  const double tp = static_cast<double>(t_prime);
  const double p1 = std::pow(beta1, e);
  const double p2 = std::pow(beta2, e);
  const double correction =
      std::sqrt(1.0 - std::pow(beta2, total)) / (1.0 - std::pow(beta1, total));
  const double num = p1 * (1.0 - std::pow(beta1, tp)) + k * (1.0 - p1);
  const double den = std::sqrt(p2 * (1.0 - std::pow(beta2, tp)) + k * k * (1.0 - p2));
  return correction * num / den;
}

}  // namespace detail

}  // namespace adamrel::theory
