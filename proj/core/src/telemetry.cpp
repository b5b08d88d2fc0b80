// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/telemetry.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "adamrel/errors.hpp"
#include "adamrel/io.hpp"
#include "adamrel/theory.hpp"

namespace adamrel::telemetry {

namespace {

// [begin, end) index ranges of consecutive records sharing a chunk_index.
std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(
    std::span<const StepRecord> records) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].chunk_index != records[begin].chunk_index) {
      if (i > begin) ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

}  // namespace

ChunkProfile chunk_average(std::span<const StepRecord> records, std::size_t chunk_length) {
  if (chunk_length == 0) throw std::invalid_argument("chunk_average: chunk_length must be >= 1");
  std::vector<std::size_t> starts;
  for (const auto& [begin, end] : chunk_ranges(records)) {
    const std::size_t len = end - begin;
    if (len > chunk_length) {
      throw std::invalid_argument("chunk_average: chunk " +
                                  std::to_string(records[begin].chunk_index) + " has " +
                                  std::to_string(len) + " records, more than chunk_length " +
                                  std::to_string(chunk_length));
    }
    if (len == chunk_length) starts.push_back(begin);
  }
  if (starts.size() < 2) {
    throw InsufficientDataError("chunk_average: need at least 2 complete chunks, got " +
                                std::to_string(starts.size()));
  }

  ChunkProfile profile;
  profile.chunk_length = chunk_length;
  profile.chunk_count = starts.size();
  profile.grad_norm_mean.assign(chunk_length, 0.0);
  profile.grad_norm_se.assign(chunk_length, 0.0);
  profile.update_norm_mean.assign(chunk_length, 0.0);
  profile.update_norm_se.assign(chunk_length, 0.0);

  const double n = static_cast<double>(starts.size());
  for (std::size_t p = 0; p < chunk_length; ++p) {
    double gsum = 0.0, usum = 0.0;
    for (std::size_t s : starts) {
      gsum += records[s + p].grad_norm;
      usum += records[s + p].update_norm;
    }
    const double gmean = gsum / n;
    const double umean = usum / n;
    double gss = 0.0, uss = 0.0;
    for (std::size_t s : starts) {
      const double dg = records[s + p].grad_norm - gmean;
      const double du = records[s + p].update_norm - umean;
      gss += dg * dg;
      uss += du * du;
    }
    profile.grad_norm_mean[p] = gmean;
    profile.update_norm_mean[p] = umean;
    profile.grad_norm_se[p] = std::sqrt(gss / (n - 1.0)) / std::sqrt(n);
    profile.update_norm_se[p] = std::sqrt(uss / (n - 1.0)) / std::sqrt(n);
  }
  return profile;
}

std::size_t infer_chunk_length(std::span<const StepRecord> records) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& [begin, end] : chunk_ranges(records)) ++counts[end - begin];
  if (counts.empty()) throw InsufficientDataError("infer_chunk_length: no records");
  std::size_t best = 0, best_count = 0;
  for (const auto& [len, count] : counts) {
    if (count >= best_count) {
      best = len;
      best_count = count;
    }
  }
  return best;
}

double estimate_k(const ChunkProfile& profile) {
  if (profile.grad_norm_mean.empty())
    throw std::invalid_argument("estimate_k: empty profile");
  const double last = profile.grad_norm_mean.back();
  if (!(last > 0.0)) throw std::invalid_argument("estimate_k: zero pre-boundary grad norm");
  return profile.grad_norm_mean.front() / last;
}

TheoryOverlay theory_overlay(const ChunkProfile& profile, double k_estimate,
                             optim::Variant variant, double beta1, double beta2) {
  if (!(k_estimate > 0.0) || !std::isfinite(k_estimate))
    throw std::invalid_argument("theory_overlay: k_estimate must be positive");
  if (profile.chunk_length < 1)
    throw std::invalid_argument("theory_overlay: chunk_length must be >= 1");
  TheoryOverlay overlay;
  overlay.variant = variant;
  overlay.k = k_estimate;
  overlay.theory_update.resize(profile.chunk_length);
  for (std::size_t t = 0; t < profile.chunk_length; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    double u = 1.0;
    switch (variant) {
      case optim::Variant::Adam:
      case optim::Variant::AdamEqBetas:
        u = theory::adam_limit_update(k_estimate, ti, beta1, beta2);
        break;
      case optim::Variant::AdamRel:
        u = theory::adamrel_limit_update(k_estimate, ti, beta1, beta2);
        break;
      case optim::Variant::AdamMR:
        u = 1.0;
        break;
    }
    overlay.theory_update[t] = u;
  }
  return overlay;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "step,episode_return,grad_norm,update_norm,max_abs_update,t_local,chunk_index\n";
  for (const auto& row : rows) {
    const auto& r = row.record;
    out << r.step_index << ','
        << (row.episode_return ? io::format_double(*row.episode_return) : std::string())
        << ',' << io::format_double(r.grad_norm) << ',' << io::format_double(r.update_norm)
        << ',' << io::format_double(r.max_abs_update) << ',' << r.t_local << ','
        << r.chunk_index << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  const auto table = io::read_csv(in);
  const std::size_t c_step = table.column("step");
  const std::size_t c_ret = table.column("episode_return");
  const std::size_t c_grad = table.column("grad_norm");
  const std::size_t c_upd = table.column("update_norm");
  const std::size_t c_max = table.column("max_abs_update");
  const std::size_t c_t = table.column("t_local");
  const std::size_t c_chunk = table.column("chunk_index");

  auto need_int = [](const std::string& s, std::size_t line) {
    auto v = io::parse_int(s);
    if (!v) throw std::invalid_argument("metrics csv: bad integer '" + s + "' on line " +
                                        std::to_string(line));
    return static_cast<std::int64_t>(*v);
  };
  auto need_double = [](const std::string& s, std::size_t line) {
    auto v = io::parse_double(s);
    if (!v) throw std::invalid_argument("metrics csv: bad number '" + s + "' on line " +
                                        std::to_string(line));
    return *v;
  };

  std::vector<MetricsRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const std::size_t line = i + 2;
    MetricsRow row;
    row.record.step_index = need_int(cells[c_step], line);
    if (!cells[c_ret].empty()) row.episode_return = need_double(cells[c_ret], line);
    row.record.grad_norm = need_double(cells[c_grad], line);
    row.record.update_norm = need_double(cells[c_upd], line);
    row.record.max_abs_update = need_double(cells[c_max], line);
    row.record.t_local = need_int(cells[c_t], line);
    row.record.chunk_index = need_int(cells[c_chunk], line);
    if (!rows.empty() && rows.back().record.chunk_index == row.record.chunk_index)
      row.record.pos_in_chunk = rows.back().record.pos_in_chunk + 1;
    rows.push_back(row);
  }
  return rows;
}

void write_profile_csv(std::ostream& out, const ChunkProfile& profile,
                       const TheoryOverlay& overlay) {
  if (overlay.theory_update.size() != profile.chunk_length)
    throw std::invalid_argument("write_profile_csv: overlay length mismatch");
  out << "pos_in_chunk,grad_norm_mean,grad_norm_se,update_norm_mean,update_norm_se,"
         "theory_update\n";
  for (std::size_t p = 0; p < profile.chunk_length; ++p) {
    out << p << ',' << io::format_double(profile.grad_norm_mean[p]) << ','
        << io::format_double(profile.grad_norm_se[p]) << ','
        << io::format_double(profile.update_norm_mean[p]) << ','
        << io::format_double(profile.update_norm_se[p]) << ','
        << io::format_double(overlay.theory_update[p]) << '\n';
  }
}

}  // namespace adamrel::telemetry
