// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <ostream>

#include "adamrel/optimizer.hpp"
#include "adamrel/tensor_nn.hpp"

namespace adamrel {

/// Text checkpoint, version 1:
///
///   adamrel-checkpoint 1
///   layers <L>
///   <fan_in> <fan_out> <weight_offset> <bias_offset>     (L lines)
///   params <N>
///   <value>                                              (N lines)
///   optimizer <N> <t_local> <steps_total>
///   <m_i> <v_i>                                          (N lines)
///   end
///
/// Values use 17 significant digits, so loading restores them bit for bit.
struct Checkpoint {
  nn::FlatParams params;
  optim::OptimizerState optimizer;

  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);

/// Throws std::invalid_argument on a malformed or unsupported file.
Checkpoint load_checkpoint(std::istream& in);

}  // namespace adamrel
