// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adamrel/errors.hpp"
#include "adamrel/rng.hpp"

namespace adamrel::stats {

namespace {

double iqm_sorted_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t trim = v.size() / 4;
  double sum = 0.0;
  for (std::size_t i = trim; i < v.size() - trim; ++i) sum += v[i];
  return sum / static_cast<double>(v.size() - 2 * trim);
}

void check_strata(const StratifiedScores& scores) {
  if (scores.empty()) throw InsufficientDataError("bootstrap: no tasks");
  for (std::size_t t = 0; t < scores.size(); ++t) {
    if (scores[t].size() < 2) {
      throw InsufficientDataError("bootstrap: task " + std::to_string(t) + " has " +
                                  std::to_string(scores[t].size()) +
                                  " seeds, need at least 2");
    }
  }
}

}  // namespace

double iqm(std::span<const double> scores) {
  if (scores.size() < 4)
    throw InsufficientDataError("iqm: need at least 4 scores, got " +
                                std::to_string(scores.size()));
  std::vector<double> v(scores.begin(), scores.end());
  return iqm_sorted_inplace(v);
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InsufficientDataError("quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double pooled_iqm(const StratifiedScores& scores) {
  std::vector<double> all;
  for (const auto& task : scores) all.insert(all.end(), task.begin(), task.end());
  return iqm(all);
}

std::vector<double> stratified_bootstrap_distribution(const StratifiedScores& scores,
                                                      std::size_t n_resamples,
                                                      std::uint64_t seed) {
  check_strata(scores);
  if (n_resamples == 0) throw std::invalid_argument("bootstrap: n_resamples must be >= 1");
  std::size_t total = 0;
  for (const auto& task : scores) total += task.size();
  if (total < 4) throw InsufficientDataError("bootstrap: IQM needs at least 4 scores");

  Rng rng(seed);
  std::vector<double> out(n_resamples);
  std::vector<double> pooled(total);
  for (std::size_t b = 0; b < n_resamples; ++b) {
    std::size_t k = 0;
    for (const auto& task : scores)
      for (std::size_t i = 0; i < task.size(); ++i) pooled[k++] = task[rng.below(task.size())];
    out[b] = iqm_sorted_inplace(pooled);
  }
  return out;
}

Interval percentile_interval(std::span<const double> distribution, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("percentile_interval: level must lie in (0, 1)");
  const double tail = (1.0 - level) / 2.0;
  return {quantile(distribution, tail), quantile(distribution, 1.0 - tail)};
}

Interval stratified_bootstrap_ci(const StratifiedScores& scores, std::size_t n_resamples,
                                 double level, std::uint64_t seed) {
  if (n_resamples < 1000)
    throw std::invalid_argument("bootstrap: n_resamples must be at least 1000");
  const auto dist = stratified_bootstrap_distribution(scores, n_resamples, seed);
  return percentile_interval(dist, level);
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.size() < 2) throw InsufficientDataError("mean_and_se: need at least 2 values");
  double sum = 0.0;
  for (double x : values) sum += x;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace adamrel::stats
