// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "adamrel/envs.hpp"
#include "adamrel/optimizer.hpp"
#include "adamrel/telemetry.hpp"

namespace adamrel::rl {

/// Fits a linear student to the regression switch task with squared error,
/// phase_length optimizer steps per schedule entry. The optimizer boundary
/// hook fires at the start of every phase after the first, so chunk_index
/// equals the phase index.
std::vector<telemetry::StepRecord> fit_regression_switch(
    const envs::RegressionSwitchConfig& task, const optim::OptimizerConfig& optimizer,
    std::uint64_t seed);

}  // namespace adamrel::rl
