// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>
#include <string>

#include "adamrel/envs.hpp"

namespace adamrel::envs {

CartPole::CartPole(CartPoleConfig config) : config_(config), state_(4, 0.0) {
  if (config_.max_steps < 1) throw std::invalid_argument("cartpole: max_steps must be >= 1");
}

std::vector<double> CartPole::reset(std::uint64_t seed) {
  Rng rng(seed);
  for (double& s : state_) s = rng.uniform(-kInitBound, kInitBound);
  steps_ = 0;
  done_ = false;
  return state_;
}

StepOutcome CartPole::step(std::size_t action) {
  if (action >= action_count())
    throw std::invalid_argument("cartpole: invalid action " + std::to_string(action));
  if (done_) throw std::logic_error("cartpole: step after episode end; call reset");

  double& x = state_[0];
  double& x_dot = state_[1];
  double& theta = state_[2];
  double& theta_dot = state_[3];

  const double total_mass = kMassCart + kMassPole;
  const double pole_mass_length = kMassPole * kHalfLength;
  const double force = action == 1 ? kForceMag : -kForceMag;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  x += kTau * x_dot;
  x_dot += kTau * x_acc;
  theta += kTau * theta_dot;
  theta_dot += kTau * theta_acc;
  ++steps_;

  StepOutcome out;
  const bool failed = x < -kXLimit || x > kXLimit || theta < -kThetaLimit || theta > kThetaLimit;
  out.reward = 1.0;
  out.done = failed || steps_ >= config_.max_steps;
  done_ = out.done;
  out.observation = state_;
  return out;
}

std::unique_ptr<Environment> CartPole::clone() const {
  return std::make_unique<CartPole>(*this);
}

}  // namespace adamrel::envs
