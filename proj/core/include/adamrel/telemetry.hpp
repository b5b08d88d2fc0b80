// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "adamrel/optimizer.hpp"

namespace adamrel::telemetry {

/// One optimizer update. chunk_index counts objective boundaries seen so far
/// and pos_in_chunk counts updates since the last one.
struct StepRecord {
  std::int64_t step_index = 0;
  std::int64_t chunk_index = 0;
  std::int64_t pos_in_chunk = 0;
  double grad_norm = 0.0;
  double update_norm = 0.0;
  double max_abs_update = 0.0;
  std::int64_t t_local = 0;

  bool operator==(const StepRecord&) const = default;
};

/// A StepRecord plus the mean return of episodes that finished since the
/// previous row (absent when none did).
struct MetricsRow {
  StepRecord record;
  std::optional<double> episode_return;

  bool operator==(const MetricsRow&) const = default;
};

/// Position-wise mean and standard error across chunks.
struct ChunkProfile {
  std::size_t chunk_length = 0;
  std::size_t chunk_count = 0;
  std::vector<double> grad_norm_mean;
  std::vector<double> grad_norm_se;
  std::vector<double> update_norm_mean;
  std::vector<double> update_norm_se;
};

/// Groups consecutive records by chunk_index and averages the chunks that
/// hold exactly chunk_length records; shorter chunks (the trailing partial
/// one, or a warm-up fragment) are dropped. A chunk longer than chunk_length
/// is an std::invalid_argument. Standard errors use the n-1 sample deviation.
/// Throws InsufficientDataError with fewer than two complete chunks.
ChunkProfile chunk_average(std::span<const StepRecord> records,
                           std::size_t chunk_length);

/// Most frequent chunk size in the records (ties -> the larger size).
std::size_t infer_chunk_length(std::span<const StepRecord> records);

/// Ratio of the profile's first-position mean grad norm to its last-position
/// mean grad norm: how much the gradient jumps across a boundary.
double estimate_k(const ChunkProfile& profile);

struct TheoryOverlay {
  optim::Variant variant = optim::Variant::Adam;
  double k = 1.0;
  /// Closed-form update size for t = 0..chunk_length-1.
  std::vector<double> theory_update;
};

/// Evaluates the step-change model at the measured k next to an empirical
/// profile. Adam and AdamEqBetas use the no-reset limit, AdamRel the reset
/// limit, AdamMR the constant unit update. Throws std::invalid_argument for
/// k <= 0 or an empty profile.
TheoryOverlay theory_overlay(const ChunkProfile& profile, double k_estimate,
                             optim::Variant variant, double beta1 = 0.9,
                             double beta2 = 0.999);

/// Header: step,episode_return,grad_norm,update_norm,max_abs_update,t_local,chunk_index
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

/// Inverse of write_metrics_csv. pos_in_chunk is rebuilt from runs of equal
/// chunk_index. Throws std::invalid_argument on malformed input.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

/// Header: pos_in_chunk,grad_norm_mean,grad_norm_se,update_norm_mean,update_norm_se,theory_update
void write_profile_csv(std::ostream& out, const ChunkProfile& profile,
                       const TheoryOverlay& overlay);

}  // namespace adamrel::telemetry
