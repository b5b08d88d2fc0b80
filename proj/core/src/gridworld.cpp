// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include "adamrel/envs.hpp"

namespace adamrel::envs {

namespace {

bool inside(const GridworldConfig& c, Cell p) {
  return p.x >= 0 && p.y >= 0 && p.x < c.width && p.y < c.height;
}

Cell move(Cell p, std::size_t action) {
  switch (action) {
    case 0: return {p.x, p.y - 1};
    case 1: return {p.x + 1, p.y};
    case 2: return {p.x, p.y + 1};
    default: return {p.x - 1, p.y};
  }
}

}  // namespace

void GridworldConfig::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("gridworld: empty grid");
  if (max_steps < 1) throw std::invalid_argument("gridworld: max_steps must be >= 1");
  if (!inside(*this, start)) throw std::invalid_argument("gridworld: start outside grid");
  if (!inside(*this, goal)) throw std::invalid_argument("gridworld: goal outside grid");
  if (start == goal) throw std::invalid_argument("gridworld: start equals goal");
  for (const Cell& h : hazards) {
    if (!inside(*this, h)) throw std::invalid_argument("gridworld: hazard outside grid");
    if (h == goal) throw std::invalid_argument("gridworld: goal is a hazard");
    if (h == start) throw std::invalid_argument("gridworld: start is a hazard");
  }
  if (!(gamma_hint > 0.0 && gamma_hint <= 1.0))
    throw std::invalid_argument("gridworld: gamma hint must lie in (0, 1]");
}

Gridworld::Gridworld(GridworldConfig config) : config_(std::move(config)) {
  config_.validate();
  pos_ = config_.start;
}

bool Gridworld::is_hazard(Cell c) const {
  return std::find(config_.hazards.begin(), config_.hazards.end(), c) !=
         config_.hazards.end();
}

std::size_t Gridworld::observation_dim() const {
  return static_cast<std::size_t>(config_.width * config_.height) + 1;
}

std::vector<double> Gridworld::observe() const {
  std::vector<double> obs(observation_dim(), 0.0);
  obs[static_cast<std::size_t>(pos_.y * config_.width + pos_.x)] = 1.0;
  obs.back() = static_cast<double>(steps_) / static_cast<double>(config_.max_steps);
  return obs;
}

std::vector<double> Gridworld::reset(std::uint64_t /*seed*/) {
  pos_ = config_.start;
  steps_ = 0;
  done_ = false;
  return observe();
}

StepOutcome Gridworld::step(std::size_t action) {
  if (action >= action_count())
    throw std::invalid_argument("gridworld: invalid action " + std::to_string(action));
  if (done_) throw std::logic_error("gridworld: step after episode end; call reset");

  StepOutcome out;
  const Cell next = move(pos_, action);
  if (inside(config_, next)) pos_ = next;
  ++steps_;
  if (pos_ == config_.goal) {
    out.reward = config_.goal_reward;
    out.done = true;
  } else if (is_hazard(pos_)) {
    out.reward = config_.hazard_penalty;
    out.done = true;
  } else {
    out.reward = config_.step_penalty;
    out.done = steps_ >= config_.max_steps;
  }
  done_ = out.done;
  out.observation = observe();
  return out;
}

std::unique_ptr<Environment> Gridworld::clone() const {
  return std::make_unique<Gridworld>(*this);
}

std::optional<double> Gridworld::optimal_return() const {
  const int w = config_.width;
  const int h = config_.height;
  std::vector<int> dist(static_cast<std::size_t>(w * h), -1);
  std::deque<Cell> queue{config_.start};
  dist[static_cast<std::size_t>(config_.start.y * w + config_.start.x)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(c.y * w + c.x)];
    if (c == config_.goal) {
      if (d > config_.max_steps) return std::nullopt;
      return config_.goal_reward + (d - 1) * config_.step_penalty;
    }
    for (std::size_t a = 0; a < 4; ++a) {
      const Cell n = move(c, a);
      if (!inside(config_, n) || is_hazard(n)) continue;
      auto& slot = dist[static_cast<std::size_t>(n.y * w + n.x)];
      if (slot >= 0) continue;
      slot = d + 1;
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

}  // namespace adamrel::envs
