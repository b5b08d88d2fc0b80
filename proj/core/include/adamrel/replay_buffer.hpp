// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adamrel/rng.hpp"

namespace adamrel::rl {

struct Transition {
  std::vector<double> obs;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

/// Fixed-capacity circular experience store. Once full, each insert
/// overwrites the oldest transition.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim);

  void add(std::span<const double> obs, std::size_t action, double reward,
           std::span<const double> next_obs, bool done);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t obs_dim() const noexcept { return obs_dim_; }

  /// Slot i in insertion order, 0 = oldest retained.
  Transition at(std::size_t i) const;

  /// batch_size slot indices drawn uniformly with replacement from the
  /// filled slots. Throws std::invalid_argument when empty.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;

  std::span<const double> obs(std::size_t slot) const {
    return {obs_.data() + slot * obs_dim_, obs_dim_};
  }
  std::span<const double> next_obs(std::size_t slot) const {
    return {next_obs_.data() + slot * obs_dim_, obs_dim_};
  }
  std::size_t action(std::size_t slot) const { return actions_[slot]; }
  double reward(std::size_t slot) const { return rewards_[slot]; }
  bool done(std::size_t slot) const { return dones_[slot] != 0; }

 private:
  std::size_t capacity_;
  std::size_t obs_dim_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::vector<double> obs_;
  std::vector<double> next_obs_;
  std::vector<std::size_t> actions_;
  std::vector<double> rewards_;
  std::vector<unsigned char> dones_;
};

}  // namespace adamrel::rl
