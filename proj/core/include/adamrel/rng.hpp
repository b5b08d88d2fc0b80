// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace adamrel {

/// One SplitMix64 output for the given input. Used as the mixing function of
/// the seed-splitting scheme below.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based stream splitting: the seed of stream `stream` under root
/// seed `root` is output stream + 1 of a SplitMix64 generator whose state
/// starts at splitmix64(root), i.e. splitmix64(splitmix64(root) + stream * gamma).
/// Derived seeds can be derived again to build hierarchies
/// (run -> environment -> episode).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

/// Deterministic random source. Wraps std::mt19937_64, whose raw output is
/// fixed by the standard, and draws uniforms and normals with explicit
/// formulas so sequences do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace adamrel
