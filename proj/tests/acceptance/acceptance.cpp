// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each criterion prints exactly one
// "[PASS]" or "[FAIL]" line; "[INFO]" lines carry supporting numbers.
// Exit status is 0 only if every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adamrel/cli/app.hpp"
#include "adamrel/cli/config.hpp"
#include "adamrel/dqn.hpp"
#include "adamrel/envs.hpp"
#include "adamrel/gae.hpp"
#include "adamrel/io.hpp"
#include "adamrel/optimizer.hpp"
#include "adamrel/ppo.hpp"
#include "adamrel/regression_fit.hpp"
#include "adamrel/rng.hpp"
#include "adamrel/telemetry.hpp"
#include "adamrel/tensor_nn.hpp"
#include "adamrel/theory.hpp"

namespace {

using namespace adamrel;
using Clock = std::chrono::steady_clock;
using optim::Variant;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void info(const std::string& text) { std::cout << "[INFO]   " << text << '\n'; }

std::uint64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (std::signbit(a) != std::signbit(b)) return std::numeric_limits<std::uint64_t>::max();
  std::uint64_t ia, ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  return ia > ib ? ia - ib : ib - ia;
}

// Largest |simulated - closed form| for Adam after t_prime pre-change steps.
double limit_gap(std::int64_t t_prime) {
  double worst = 0.0;
  for (double k : {1.0, 2.0, 10.0, 100.0, 1e4}) {
    theory::StepGradientScenario s;
    s.k = k;
    s.t_prime = t_prime;
    s.t_max = 63;
    const auto curve = theory::simulate_step_gradient(s, Variant::Adam);
    for (const auto& p : curve.points)
      worst = std::max(worst, std::fabs(p.update_size - theory::adam_limit_update(k, p.t)));
  }
  return worst;
}

Outcome limit_equivalence() {
  const auto start = Clock::now();
  const double gap = limit_gap(5000);
  const double elapsed = seconds_since(start);
  info("t'=20000 gives max gap " + fmt(limit_gap(20000)));
  return {gap < 1e-6 && elapsed < 1.0,
          "t'=5000 max |simulated - limit| = " + fmt(gap) + " (need < 1e-6), " + fmt(elapsed) + " s"};
}

Outcome sqrt10_peak() {
  const double u = theory::adam_limit_update(1e9, 0);
  return {std::fabs(u - 3.16228) <= 1e-3, "adam_limit_update(1e9, 0) = " + fmt(u)};
}

Outcome adamrel_unit_limit() {
  double worst = 0.0;
  for (std::int64_t t = 0; t <= 100; ++t)
    worst = std::max(worst, std::fabs(theory::adamrel_limit_update(1e9, t) - 1.0));
  return {worst <= 1e-3, "max |adamrel_limit_update(1e9, t) - 1| over t=0..100 = " + fmt(worst)};
}

Outcome adamrel_bound() {
  double best = 0.0, best_k = 0.0;
  std::int64_t best_t = 0;
  for (int i = 0; i < 1000; ++i) {
    const double k = std::pow(10.0, 9.0 * i / 999.0);
    for (std::int64_t t = 0; t <= 20000; ++t) {
      const double u = theory::adamrel_limit_update(k, t);
      if (u > best) {
        best = u;
        best_k = k;
        best_t = t;
      }
    }
  }
  return {best <= 1.05, "max = " + fmt(best) + " at k = " + fmt(best_k) + ", t = " + std::to_string(best_t)};
}

Outcome first_step_unit() {
  Rng rng(derive_seed(5, 0));
  optim::OptimizerConfig c;
  c.alpha = 3e-4;
  c.eps = 0.0;
  std::uint64_t worst = 0;
  bool mr_identical = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    std::vector<double> g(n);
    for (auto& x : g) x = rng.normal() * std::exp(3.0 * rng.normal());
    for (auto& x : g)
      if (x == 0.0) x = 1.0;

    for (Variant v : {Variant::Adam, Variant::AdamRel, Variant::AdamMR}) {
      c.variant = v;
      optim::Optimizer fresh(c, n);
      std::vector<double> p(n, 0.0);
      const auto r = fresh.step(g, p);
      for (double u : r.update) worst = std::max(worst, ulp_distance(std::fabs(u), c.alpha));
    }

    c.variant = Variant::AdamMR;
    optim::Optimizer used(c, n), fresh(c, n);
    std::vector<double> p_used(n, 0.0), p_fresh(n, 0.0), h(n);
    for (int s = 0; s < 1 + static_cast<int>(rng.below(50)); ++s) {
      for (auto& x : h) x = rng.normal();
      used.step(h, p_used);
    }
    used.notify_boundary();
    const auto a = used.step(g, p_used).update;
    const auto b = fresh.step(g, p_fresh).update;
    mr_identical = mr_identical && a == b && used.state().m == fresh.state().m &&
                   used.state().v == fresh.state().v;
  }
  return {worst <= 4 && mr_identical,
          "max ulp distance of |update| from alpha = " + std::to_string(worst) +
              ", Adam-MR post-reset step bit-identical: " + (mr_identical ? "yes" : "no")};
}

double post_reset_ratio(int pre_steps) {
  optim::OptimizerConfig c;
  c.alpha = 1.0;
  c.eps = 0.0;
  c.variant = Variant::AdamRel;
  optim::Optimizer opt(c, 1);
  std::vector<double> p{0.0}, g{1.0};
  for (int i = 0; i < pre_steps; ++i) opt.step(g, p);
  opt.notify_boundary();
  return std::fabs(opt.step(g, p).update[0]) / c.alpha;
}

Outcome post_reset_value() {
  const double u = post_reset_ratio(5000);
  info("after 20000 steps the first post-reset update is " + fmt(post_reset_ratio(20000)) + " * alpha");
  return {std::fabs(u - 0.316228) <= 1e-4,
          "after 5000 steps the first post-reset update is " + fmt(u) + " * alpha (target 0.316228)"};
}

double head_functional(const nn::MlpSpec& spec, const nn::FlatParams& p, const nn::Matrix& x,
                       const nn::Matrix& weights) {
  const auto out = nn::forward(spec, p, x);
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    std::size_t col = 0;
    for (std::size_t a = 0; a < out.logits.cols; ++a) total += weights(r, col++) * out.logits(r, a);
    if (!out.values.empty()) total += weights(r, col) * out.values[r];
  }
  return total;
}

Outcome gradient_check() {
  Rng rng(derive_seed(7, 0));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t actions = 2 + rng.below(4);
    const int kind = static_cast<int>(rng.below(3));
    const auto head = kind == 0   ? nn::OutputHead::scalar()
                      : kind == 1 ? nn::OutputHead::categorical(actions)
                                  : nn::OutputHead::dual(actions);
    nn::MlpSpec spec;
    spec.activation = rng.below(2) ? nn::Activation::Tanh : nn::Activation::ReLU;
    spec.head = head;
    spec.layer_sizes.push_back(1 + rng.below(6));
    for (std::size_t h = 0, depth = 1 + rng.below(3); h < depth; ++h)
      spec.layer_sizes.push_back(2 + rng.below(8));
    spec.layer_sizes.push_back(head.width());

    auto p = nn::make_params(spec);
    for (auto& v : p.values) v = 0.5 * rng.normal();
    nn::Matrix x(1 + rng.below(5), spec.input_dim());
    for (auto& v : x.data) v = rng.normal();
    nn::Matrix w(x.rows, head.width());
    for (auto& v : w.data) v = rng.normal();

    nn::HeadGrads up;
    const std::size_t n_logits = head.kind == nn::OutputHead::Kind::Scalar ? 0 : head.actions;
    up.d_logits = nn::Matrix(n_logits ? x.rows : 0, n_logits);
    for (std::size_t r = 0; r < up.d_logits.rows; ++r)
      for (std::size_t a = 0; a < n_logits; ++a) up.d_logits(r, a) = w(r, a);
    if (head.kind != nn::OutputHead::Kind::Categorical)
      for (std::size_t r = 0; r < x.rows; ++r) up.d_values.push_back(w(r, n_logits));

    const auto g = nn::backward(spec, p, x, up);
    const double h = 1e-6;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p.values[i];
      p.values[i] = saved + h;
      const double plus = head_functional(spec, p, x, w);
      p.values[i] = saved - h;
      const double minus = head_functional(spec, p, x, w);
      p.values[i] = saved;
      const double fd = (plus - minus) / (2 * h);
      const double scale = std::max({std::fabs(fd), std::fabs(g[i]), 1e-6});
      worst = std::max(worst, std::fabs(fd - g[i]) / scale);
    }
  }
  return {worst < 1e-4, "max relative error over 100 networks = " + fmt(worst)};
}

// Direct sum A_t = sum_l (gamma lambda)^l delta_{t+l}, truncated at the first done.
std::vector<double> gae_by_sum(const std::vector<double>& r, const std::vector<double>& v,
                               const std::vector<double>& d, const std::vector<double>& next,
                               std::size_t steps, std::size_t envs, double gamma, double lambda) {
  std::vector<double> adv(steps * envs, 0.0);
  for (std::size_t e = 0; e < envs; ++e)
    for (std::size_t t = 0; t < steps; ++t) {
      double sum = 0.0, weight = 1.0;
      for (std::size_t l = t; l < steps; ++l) {
        const std::size_t i = l * envs + e;
        const double v_next = l + 1 < steps ? v[(l + 1) * envs + e] : next[e];
        sum += weight * (r[i] + gamma * v_next * (1.0 - d[i]) - v[i]);
        if (d[i] != 0.0) break;
        weight *= gamma * lambda;
      }
      adv[t * envs + e] = sum;
    }
  return adv;
}

Outcome gae_oracle() {
  Rng rng(derive_seed(8, 0));
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t steps = 1 + rng.below(32), envs = 1 + rng.below(4);
    const double gamma = rng.uniform(0.5, 1.0), lambda = rng.uniform(0.0, 1.0);
    std::vector<double> r(steps * envs), v(steps * envs), d(steps * envs), next(envs);
    for (auto& x : r) x = rng.normal();
    for (auto& x : v) x = rng.normal();
    for (auto& x : d) x = rng.uniform() < 0.15 ? 1.0 : 0.0;
    for (auto& x : next) x = rng.normal();
    const auto got = rl::compute_gae(r, v, d, next, envs, gamma, lambda);
    const auto want = gae_by_sum(r, v, d, next, steps, envs, gamma, lambda);
    for (std::size_t i = 0; i < want.size(); ++i) {
      worst = std::max(worst, std::fabs(got.advantages[i] - want[i]));
      worst = std::max(worst, std::fabs(got.returns[i] - (want[i] + v[i])));
    }
  }
  return {worst < 1e-10, "max abs error over 1000 rollouts = " + fmt(worst)};
}

cli::RunConfig preset(const std::string& name) {
  auto c = cli::RunConfig::defaults();
  cli::apply_preset(c, name);
  return c;
}

Outcome reset_cadence() {
  auto pc = preset("ppo-adamrel-gridworld");
  auto ppo = cli::ppo_config(pc);
  ppo.eval_interval = 0;
  const auto env = cli::make_environment(pc);
  const auto ppo_run = rl::ppo_train(*env, ppo, 8 * static_cast<std::int64_t>(ppo.batch_size()), 0);
  const std::size_t per_batch = ppo.num_epochs * ppo.num_minibatches;
  bool ppo_ok = ppo_run.metrics.size() == 8 * per_batch;
  for (std::size_t i = 0; i < ppo_run.metrics.size(); ++i)
    ppo_ok = ppo_ok && ppo_run.metrics[i].record.t_local == static_cast<std::int64_t>(i % per_batch + 1);

  auto dc = preset("dqn-adamrel-gridworld");
  auto dqn = cli::dqn_config(dc);
  dqn.eval_interval = 0;
  const auto dqn_run = rl::dqn_train(*env, dqn, 30000, 0);
  std::int64_t max_t = 0;
  for (const auto& m : dqn_run.metrics) max_t = std::max(max_t, m.record.t_local);
  const bool dqn_ok = !dqn_run.metrics.empty() && max_t <= dqn.target_update_interval;
  return {ppo_ok && dqn_ok, "PPO t_local cycles 1.." + std::to_string(per_batch) + " over " +
                                std::to_string(ppo_run.metrics.size()) + " steps: " +
                                (ppo_ok ? "yes" : "no") + "; DQN max t_local " +
                                std::to_string(max_t) + " (interval " +
                                std::to_string(dqn.target_update_interval) + " env steps)"};
}

Outcome training_sanity() {
  const auto start = Clock::now();
  const auto probe = cli::make_environment(preset("ppo-adam-gridworld"));
  const double optimal = *dynamic_cast<const envs::Gridworld&>(*probe).optimal_return();
  const double threshold = 0.9 * optimal;
  bool all = true;
  for (const std::string algo : {"ppo", "dqn"})
    for (const std::string variant : {"adam", "adamrel"}) {
      const auto c = preset(algo + "-" + variant + "-gridworld");
      const auto env = cli::make_environment(c);
      const auto budget = c.get_int("train.total_steps");
      std::string steps;
      int solved = 0;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        rl::TrainResult r;
        if (algo == "ppo") {
          auto cfg = cli::ppo_config(c);
          cfg.stop_return = threshold;
          r = rl::ppo_train(*env, cfg, budget, seed);
        } else {
          auto cfg = cli::dqn_config(c);
          cfg.stop_return = threshold;
          r = rl::dqn_train(*env, cfg, budget, seed);
        }
        const auto hit = std::find_if(r.evaluations.begin(), r.evaluations.end(),
                                      [&](const rl::EvalPoint& e) { return e.value >= threshold; });
        if (hit != r.evaluations.end()) {
          ++solved;
          steps += " " + std::to_string(hit->env_step);
        } else {
          steps += " -";
        }
      }
      info(algo + "/" + variant + ": " + std::to_string(solved) + "/5 seeds reached " + fmt(threshold) +
           " (env steps:" + steps + ", budget " + std::to_string(budget) + ")");
      all = all && solved == 5;
    }
  const double elapsed = seconds_since(start);
  return {all && elapsed < 900.0, "optimal return " + fmt(optimal) + ", all 20 runs reached 90%: " +
                                      (all ? "yes" : "no") + ", " + fmt(elapsed) + " s"};
}

Outcome gradient_jump() {
  envs::RegressionSwitchConfig task;
  task.phase_length = 400;
  task.noise_std = 0.5;
  task.target_scale_schedule.clear();
  for (int i = 0; i < 60; ++i) task.target_scale_schedule.push_back(i % 2 ? 10.0 : 1.0);

  optim::OptimizerConfig opt;
  opt.alpha = 0.05;
  bool ok = true;
  std::string detail;
  for (Variant v : {Variant::Adam, Variant::AdamRel}) {
    opt.variant = v;
    const auto records = rl::fit_regression_switch(task, opt, 0);
    const auto prof = telemetry::chunk_average(records, task.phase_length);
    double last_quarter = 0.0;
    const std::size_t q = task.phase_length / 4;
    for (std::size_t i = task.phase_length - q; i < task.phase_length; ++i) last_quarter += prof.grad_norm_mean[i];
    last_quarter /= static_cast<double>(q);
    const bool jump = prof.grad_norm_mean[0] > last_quarter;
    ok = ok && jump;
    detail += std::string(optim::to_string(v)) + ": grad at pos 0 " + fmt(prof.grad_norm_mean[0]) +
              " vs last quarter " + fmt(last_quarter) + "; ";
    if (v == Variant::AdamRel) {
      const auto half_end = prof.update_norm_mean.begin() + static_cast<long>(task.phase_length / 2);
      const auto argmin = std::min_element(prof.update_norm_mean.begin(), half_end) -
                          prof.update_norm_mean.begin();
      ok = ok && argmin == 0;
      detail += "update argmin in first half " + std::to_string(argmin) + " over " +
                std::to_string(prof.chunk_count) + " chunks";
    }
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "adamrel_acceptance_determinism";
  fs::remove_all(root);
  bool same = true;
  std::size_t compared = 0;
  std::ostringstream log;
  for (const auto& [command, name] : std::vector<std::pair<std::string, std::string>>{
           {"train-ppo", "ppo-adamrel-gridworld"}, {"train-dqn", "dqn-adam-gridworld"}}) {
    cli::Invocation inv;
    inv.command = command;
    inv.preset = name;
    inv.seeds = "0,1";
    inv.out_dir = (root / (name + "_a")).string();
    inv.assignments = {"train.total_steps=20480"};
    cli::execute(cli::resolve_config(inv), {}, log);

    cli::Invocation again;
    again.command = command;
    again.config_path = (root / (name + "_a") / "manifest.txt").string();
    again.out_dir = (root / (name + "_b")).string();
    cli::execute(cli::resolve_config(again), {}, log);

    for (const char* seed : {"0", "1"}) {
      const std::string file = std::string("metrics_seed") + seed + ".csv";
      const auto a = slurp(root / (name + "_a") / file);
      const auto b = slurp(root / (name + "_b") / file);
      same = same && !a.empty() && a == b;
      ++compared;
    }
  }
  fs::remove_all(root);
  return {same, std::to_string(compared) + " metrics CSVs rerun from their manifests: " +
                    (same ? "bit-identical" : "DIFFERENT")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adamrel acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criterion numbers");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "step-change oracle equivalence", limit_equivalence},
      {2, "Adam peak at large k", sqrt10_peak},
      {3, "Adam-Rel unit limit", adamrel_unit_limit},
      {4, "Adam-Rel near-unit bound", adamrel_bound},
      {5, "first-step unit update", first_step_unit},
      {6, "post-reset annealing value", post_reset_value},
      {7, "MLP gradient correctness", gradient_check},
      {8, "GAE oracle", gae_oracle},
      {9, "reset cadence", reset_cadence},
      {10, "gridworld training sanity", training_sanity},
      {11, "gradient jump at boundaries", gradient_jump},
      {12, "determinism", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << ": " << out.detail
              << std::endl;
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
