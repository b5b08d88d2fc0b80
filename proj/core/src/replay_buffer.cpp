// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace adamrel::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim)
    : capacity_(capacity),
      obs_dim_(obs_dim),
      obs_(capacity * obs_dim),
      next_obs_(capacity * obs_dim),
      actions_(capacity),
      rewards_(capacity),
      dones_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer: capacity must be >= 1");
  if (obs_dim == 0) throw std::invalid_argument("replay buffer: obs_dim must be >= 1");
}

void ReplayBuffer::add(std::span<const double> obs, std::size_t action, double reward,
                       std::span<const double> next_obs, bool done) {
  if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_)
    throw std::invalid_argument("replay buffer: observation width mismatch");
  std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(cursor_ * obs_dim_));
  std::copy(next_obs.begin(), next_obs.end(),
            next_obs_.begin() + static_cast<std::ptrdiff_t>(cursor_ * obs_dim_));
  actions_[cursor_] = action;
  rewards_[cursor_] = reward;
  dones_[cursor_] = done ? 1 : 0;
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay buffer: index past size");
  const std::size_t oldest = size_ < capacity_ ? 0 : cursor_;
  const std::size_t slot = (oldest + i) % capacity_;
  Transition t;
  auto o = obs(slot);
  auto n = next_obs(slot);
  t.obs.assign(o.begin(), o.end());
  t.next_obs.assign(n.begin(), n.end());
  t.action = actions_[slot];
  t.reward = rewards_[slot];
  t.done = dones_[slot] != 0;
  return t;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw std::invalid_argument("replay buffer: sampling from empty buffer");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.below(size_);
  return idx;
}

}  // namespace adamrel::rl
