// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "adamrel/checkpoint.hpp"
#include "adamrel/cli/app.hpp"
#include "adamrel/dqn.hpp"
#include "adamrel/errors.hpp"
#include "adamrel/io.hpp"
#include "adamrel/ppo.hpp"
#include "adamrel/stats.hpp"
#include "adamrel/telemetry.hpp"
#include "adamrel/theory.hpp"

#ifndef ADAMREL_VERSION
#define ADAMREL_VERSION "unknown"
#endif

namespace adamrel::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.txt";

fs::path output_dir(const RunConfig& config) {
  const fs::path dir = config.raw("run.out_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
  return dir;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_manifest(const fs::path& dir, const RunConfig& config) {
  write_file(dir / kManifest, [&](std::ostream& out) { out << config.manifest(); });
}

RunConfig load_manifest(const fs::path& dir) {
  std::ifstream in(dir / kManifest);
  if (!in) throw std::runtime_error("no " + std::string(kManifest) + " in '" + dir.string() + "'");
  RunConfig c = RunConfig::defaults();
  apply_config_text(c, in, (dir / kManifest).string());
  return c;
}

/// metrics_seed<N>.csv files of a run directory, ordered by seed.
std::vector<std::pair<std::uint64_t, fs::path>> metrics_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: '" + dir.string() + "'");
  std::vector<std::pair<std::uint64_t, fs::path>> files;
  const std::string prefix = "metrics_seed";
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".csv") continue;
    const auto seed = io::parse_int(name.substr(prefix.size(), name.size() - prefix.size() - 4));
    if (seed && *seed >= 0) files.emplace_back(static_cast<std::uint64_t>(*seed), entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no metrics_seed*.csv files in '" + dir.string() + "'");
  return files;
}

std::vector<telemetry::MetricsRow> read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  try {
    return telemetry::read_metrics_csv(in);
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error(path.string() + ": " + err.what());
  }
}

void run_theory(const RunConfig& config, std::ostream& log) {
  const auto k_values = config.get_doubles("theory.k_values");
  const auto t_max = config.get_int("theory.t_max");
  const auto variants = theory_variants(config);
  std::vector<theory::UpdateCurve> curves;
  try {
    curves = theory::emit_update_curves(k_values, t_max, config.get_double("theory.beta1"),
                                        config.get_double("theory.beta2"), variants);
  } catch (const std::invalid_argument& err) {
    throw ConfigError("theory", 0, err.what());
  }
  const auto dir = output_dir(config);
  write_manifest(dir, config);
  write_file(dir / "curves.csv", [&](std::ostream& out) { theory::write_curves_csv(out, curves); });
  log << "wrote " << curves.size() << " curves to " << (dir / "curves.csv").string() << '\n';
}

void run_training(const RunConfig& config, bool ppo, std::ostream& log) {
  const auto prototype = make_environment(config);
  const auto seeds = config.seeds();
  const auto total_steps = config.get_int("train.total_steps");
  if (total_steps < 0) throw ConfigError("train.total_steps", 0, "train.total_steps must be >= 0");
  const bool checkpoint = config.get_bool("train.checkpoint");
  std::optional<rl::PpoConfig> ppo_cfg;
  std::optional<rl::DqnConfig> dqn_cfg;
  if (ppo)
    ppo_cfg = ppo_config(config);
  else
    dqn_cfg = dqn_config(config);
  const auto threads = std::max<std::int64_t>(1, config.get_int("run.threads"));

  const auto dir = output_dir(config);
  write_manifest(dir, config);

  std::vector<std::string> summaries(seeds.size());
  std::vector<std::exception_ptr> failures(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        const auto seed = seeds[i];
        const auto result = ppo ? rl::ppo_train(*prototype, *ppo_cfg, total_steps, seed)
                                : rl::dqn_train(*prototype, *dqn_cfg, total_steps, seed);
        const auto tag = std::to_string(seed);
        write_file(dir / ("metrics_seed" + tag + ".csv"),
                   [&](std::ostream& out) { telemetry::write_metrics_csv(out, result.metrics); });
        write_file(dir / ("evals_seed" + tag + ".csv"), [&](std::ostream& out) {
          out << "env_step,return\n";
          for (const auto& e : result.evaluations)
            out << e.env_step << ',' << io::format_double(e.value) << '\n';
        });
        if (checkpoint)
          write_file(dir / ("checkpoint_seed" + tag + ".txt"), [&](std::ostream& out) {
            save_checkpoint(out, {result.params, result.optimizer_state});
          });
        std::ostringstream s;
        s << "seed " << seed << ": " << result.env_steps << " env steps, "
          << result.metrics.size() << " updates, " << result.episodes.size() << " episodes";
        if (!result.evaluations.empty())
          s << ", last eval " << io::format_double(result.evaluations.back().value);
        summaries[i] = s.str();
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), seeds.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  for (const auto& s : summaries) log << s << '\n';
}

void run_analyze(const RunConfig& config, const std::vector<std::string>& inputs,
                 std::ostream& log) {
  if (inputs.empty()) throw ConfigError("inputs", 0, "analyze needs at least one run directory");
  std::optional<optim::Variant> variant;
  const auto& requested = config.raw("analyze.variant");
  if (requested != "auto") {
    try {
      variant = optim::parse_variant(requested);
    } catch (const std::invalid_argument& err) {
      throw ConfigError("analyze.variant", config.setting("analyze.variant").line, err.what());
    }
  }
  double beta1 = config.get_double("optimizer.beta1");
  double beta2 = config.get_double("optimizer.beta2");

  std::vector<telemetry::StepRecord> records;
  std::int64_t chunk_offset = 0;
  for (const auto& input : inputs) {
    const fs::path run = input;
    if (requested == "auto") {
      const auto manifest = load_manifest(run);
      const auto v = optimizer_config(manifest).variant;
      if (variant && *variant != v)
        throw std::runtime_error("analyze: runs mix optimizer variants; set analyze.variant");
      variant = v;
      beta1 = manifest.get_double("optimizer.beta1");
      beta2 = manifest.get_double("optimizer.beta2");
    }
    for (const auto& [seed, path] : metrics_files(run)) {
      const auto rows = read_metrics(path);
      std::int64_t last = -1;
      for (const auto& row : rows) {
        auto r = row.record;
        last = std::max(last, r.chunk_index);
        r.chunk_index += chunk_offset;
        records.push_back(r);
      }
      chunk_offset += last + 1;
    }
  }

  std::size_t chunk_length = config.get_size("analyze.chunk_length");
  if (chunk_length == 0) chunk_length = telemetry::infer_chunk_length(records);
  const auto profile = telemetry::chunk_average(records, chunk_length);
  double k = config.get_double("analyze.k");
  if (k == 0.0) k = telemetry::estimate_k(profile);
  if (!(k > 0.0)) throw std::runtime_error("analyze: k estimate is not positive");
  const auto overlay = telemetry::theory_overlay(profile, k, *variant, beta1, beta2);

  const auto dir = output_dir(config);
  write_manifest(dir, config);
  write_file(dir / "profile.csv",
             [&](std::ostream& out) { telemetry::write_profile_csv(out, profile, overlay); });
  log << "variant " << optim::to_string(*variant) << ", chunk_length " << profile.chunk_length
      << ", chunks " << profile.chunk_count << ", k " << io::format_double(k) << '\n';
}

struct RunScores {
  std::string name;
  std::string variant;
  std::string env;
  std::vector<double> scores;
};

void run_compare(const RunConfig& config, const std::vector<std::string>& inputs,
                 std::ostream& log) {
  if (inputs.empty()) throw ConfigError("inputs", 0, "compare needs at least one run directory");
  const auto n_resamples = config.get_size("compare.n_resamples");
  const auto level = config.get_double("compare.level");
  const auto boot_seed = static_cast<std::uint64_t>(config.get_int("compare.bootstrap_seed"));
  const auto last_n = config.get_size("compare.last_n");
  if (last_n == 0) throw ConfigError("compare.last_n", 0, "compare.last_n must be >= 1");

  std::vector<RunScores> runs;
  for (const auto& input : inputs) {
    const fs::path run = input;
    const auto manifest = load_manifest(run);
    RunScores rs;
    rs.name = fs::path(input).lexically_normal().filename().string();
    if (rs.name.empty()) rs.name = fs::path(input).lexically_normal().parent_path().filename().string();
    if (rs.name.find(',') != std::string::npos)
      throw std::runtime_error("compare: run name '" + rs.name + "' contains a comma");
    rs.variant = optim::to_string(optimizer_config(manifest).variant);
    rs.env = manifest.raw("env.name");
    for (const auto& [seed, path] : metrics_files(run)) {
      std::vector<double> returns;
      for (const auto& row : read_metrics(path))
        if (row.episode_return) returns.push_back(*row.episode_return);
      if (returns.empty())
        throw InsufficientDataError("compare: no episode returns in '" + path.string() + "'");
      const auto take = std::min(last_n, returns.size());
      double sum = 0.0;
      for (auto i = returns.size() - take; i < returns.size(); ++i) sum += returns[i];
      rs.scores.push_back(sum / static_cast<double>(take));
    }
    runs.push_back(std::move(rs));
  }

  const auto dir = output_dir(config);
  write_manifest(dir, config);
  std::ostringstream table;
  table << "run,variant,env,seeds,iqm,ci_lo,ci_hi\n";
  auto emit = [&](const std::string& name, const std::string& variant, const std::string& env,
                  const stats::StratifiedScores& strata) {
    std::size_t seeds = 0;
    for (const auto& s : strata) seeds += s.size();
    const double point = stats::pooled_iqm(strata);
    const auto ci = stats::stratified_bootstrap_ci(strata, n_resamples, level, boot_seed);
    table << name << ',' << variant << ',' << env << ',' << seeds << ','
          << io::format_double(point) << ',' << io::format_double(ci.lo) << ','
          << io::format_double(ci.hi) << '\n';
    log << name << " (" << variant << ", " << env << "): IQM " << io::format_double(point)
        << " [" << io::format_double(ci.lo) << ", " << io::format_double(ci.hi) << "]\n";
  };
  for (const auto& r : runs) emit(r.name, r.variant, r.env, {r.scores});

  // Per-variant aggregate across environments, stratified by environment.
  std::vector<std::string> variants;
  for (const auto& r : runs)
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
      variants.push_back(r.variant);
  for (const auto& v : variants) {
    stats::StratifiedScores strata;
    std::string envs;
    for (const auto& r : runs) {
      if (r.variant != v) continue;
      strata.push_back(r.scores);
      envs += (envs.empty() ? "" : ";") + r.env;
    }
    if (strata.size() > 1) emit("aggregate", v, envs, strata);
  }
  write_file(dir / "compare.csv", [&](std::ostream& out) { out << table.str(); });
}

}  // namespace

RunConfig resolve_config(const Invocation& inv) {
  RunConfig config = RunConfig::defaults();
  std::vector<ConfigEntry> entries;
  if (inv.config_path) entries = read_config_file(*inv.config_path);

  std::optional<std::string> preset = inv.preset;
  if (!preset)
    for (const auto& e : entries)
      if (e.key == "run.preset" && e.value != "none") preset = e.value;
  if (preset) apply_preset(config, *preset);
  for (const auto& e : entries) config.set(e.key, e.value, *inv.config_path, e.line);
  if (inv.preset) config.set("run.preset", *inv.preset, "flag");

  if (inv.seeds) config.set("run.seeds", *inv.seeds, "flag");
  if (inv.out_dir) config.set("run.out_dir", *inv.out_dir, "flag");
  for (const auto& a : inv.assignments) apply_assignment(config, a);
  config.set("run.experiment", inv.command, "flag");
  config.set("run.code_version", ADAMREL_VERSION, "flag");
  config.seeds();  // validates the seed list early
  return config;
}

void execute(const RunConfig& config, const std::vector<std::string>& inputs, std::ostream& log) {
  const auto& kind = config.raw("run.experiment");
  if (kind == "theory-curve") return run_theory(config, log);
  if (kind == "train-ppo") return run_training(config, true, log);
  if (kind == "train-dqn") return run_training(config, false, log);
  if (kind == "analyze") return run_analyze(config, inputs, log);
  if (kind == "compare") return run_compare(config, inputs, log);
  throw ConfigError("run.experiment", 0, "unknown experiment '" + kind + "'");
}

}  // namespace adamrel::cli
