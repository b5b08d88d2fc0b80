// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adamrel/rng.hpp"
#include "adamrel/tensor_nn.hpp"

namespace adamrel::envs {

struct StepOutcome {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

/// Single-owner episodic environment with a discrete action set.
class Environment {
 public:
  virtual ~Environment() = default;

  /// Starts a new episode. Deterministic in seed.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  /// Throws std::invalid_argument for actions outside [0, action_count()).
  virtual StepOutcome step(std::size_t action) = 0;

  virtual std::size_t observation_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// ---------------------------------------------------------------------------
// Gridworld

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

struct GridworldConfig {
  int width = 5;
  int height = 5;
  Cell start{0, 0};
  Cell goal{4, 4};
  std::vector<Cell> hazards;
  double step_penalty = -0.01;
  double goal_reward = 1.0;
  double hazard_penalty = -1.0;
  int max_steps = 50;
  double gamma_hint = 0.99;

  void validate() const;
};

/// Deterministic grid MDP. Actions: 0 up (y-1), 1 right (x+1), 2 down (y+1),
/// 3 left (x-1). Bumping a wall leaves the agent in place. Entering the goal
/// pays goal_reward and ends the episode; entering a hazard pays
/// hazard_penalty and ends it; every other move pays step_penalty. The
/// episode is also cut off after max_steps moves.
///
/// Observation: one-hot position (row-major, y * width + x) followed by
/// steps_taken / max_steps.
class Gridworld final : public Environment {
 public:
  explicit Gridworld(GridworldConfig config);

  std::vector<double> reset(std::uint64_t seed) override;
  StepOutcome step(std::size_t action) override;
  std::size_t observation_dim() const override;
  std::size_t action_count() const override { return 4; }
  std::string name() const override { return "gridworld"; }
  std::unique_ptr<Environment> clone() const override;

  const GridworldConfig& config() const noexcept { return config_; }
  Cell position() const noexcept { return pos_; }
  int steps_taken() const noexcept { return steps_; }
  bool is_hazard(Cell c) const;

  /// Undiscounted return of a shortest hazard-free path (breadth-first
  /// search), or nullopt if the goal is unreachable within max_steps.
  std::optional<double> optimal_return() const;

 private:
  std::vector<double> observe() const;

  GridworldConfig config_;
  Cell pos_;
  int steps_ = 0;
  bool done_ = false;
};

// ---------------------------------------------------------------------------
// CartPole

/// Classic cart-pole balancing task (Barto, Sutton & Anderson, 1983), with
/// the constants and Euler integration used by the common gym
/// implementation: g = 9.8, cart mass 1.0, pole mass 0.1, pole half-length
/// 0.5, force 10.0, tau 0.02. Failure when |x| > 2.4 or |theta| > 12 deg.
/// Reward 1 per step. Initial state components are uniform in [-0.05, 0.05].
struct CartPoleConfig {
  int max_steps = 500;
};

class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double kXLimit = 2.4;
  static constexpr double kInitBound = 0.05;

  explicit CartPole(CartPoleConfig config = {});

  std::vector<double> reset(std::uint64_t seed) override;
  StepOutcome step(std::size_t action) override;
  std::size_t observation_dim() const override { return 4; }
  std::size_t action_count() const override { return 2; }
  std::string name() const override { return "cartpole"; }
  std::unique_ptr<Environment> clone() const override;

  const std::vector<double>& state() const noexcept { return state_; }
  int steps_taken() const noexcept { return steps_; }

 private:
  CartPoleConfig config_;
  std::vector<double> state_;
  int steps_ = 0;
  bool done_ = false;
};

// ---------------------------------------------------------------------------
// Piecewise-stationary regression

/// A fixed linear teacher y = scale_p * <w, x> with x ~ N(0, I), where
/// scale_p is the schedule entry of phase p and w is drawn from task_seed.
/// Changing the scale between phases multiplies the residual a converged
/// student sees, which is how the experimenter dials in a gradient jump.
struct RegressionSwitchConfig {
  std::size_t input_dim = 8;
  std::size_t phase_length = 200;
  std::vector<double> target_scale_schedule{1.0};
  double noise_std = 0.0;
  std::size_t batch_size = 32;
  std::uint64_t task_seed = 0x5eed;

  void validate() const;
};

struct RegressionBatch {
  nn::Matrix inputs;
  std::vector<double> targets;
};

/// The teacher weights for this config (same for every phase).
std::vector<double> regression_teacher(const RegressionSwitchConfig& config);

/// Draws one batch for phase `phase_index`. Throws std::invalid_argument if
/// phase_index is past the schedule.
RegressionBatch regression_batch(const RegressionSwitchConfig& config,
                                 std::size_t phase_index, Rng& rng);

}  // namespace adamrel::envs
