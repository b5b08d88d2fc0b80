// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adamrel::stats {

/// Interquartile mean: sort, drop floor(n/4) values from each end, average
/// the rest. Needs at least 4 scores (InsufficientDataError otherwise).
double iqm(std::span<const double> scores);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::span<const double> values, double q);

/// Scores grouped by task; each inner vector holds one score per seed.
using StratifiedScores = std::vector<std::vector<double>>;

/// IQM over all tasks' scores pooled together.
double pooled_iqm(const StratifiedScores& scores);

/// Aggregate recomputed on `n_resamples` stratified resamples: seeds are
/// drawn with replacement independently inside each task. Deterministic in
/// seed. Throws InsufficientDataError for an empty stratum or fewer than 2
/// seeds in any task, std::invalid_argument if n_resamples is 0.
std::vector<double> stratified_bootstrap_distribution(const StratifiedScores& scores,
                                                      std::size_t n_resamples,
                                                      std::uint64_t seed);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Central percentile interval at `level` (e.g. 0.95) of a resample set.
Interval percentile_interval(std::span<const double> distribution, double level);

/// Stratified bootstrap percentile CI of the pooled IQM. Requires
/// n_resamples >= 1000 and level in (0, 1).
Interval stratified_bootstrap_ci(const StratifiedScores& scores,
                                 std::size_t n_resamples, double level,
                                 std::uint64_t seed);

/// Mean and (n-1) standard error.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(std::span<const double> values);

}  // namespace adamrel::stats
