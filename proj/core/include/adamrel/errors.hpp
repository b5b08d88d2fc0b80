// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace adamrel {

/// Raised when a gradient, logit or loss contains NaN or Inf. Operations that
/// raise it leave their mutable state untouched.
class PoisonedGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by aggregations that need more samples than they were given.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adamrel
