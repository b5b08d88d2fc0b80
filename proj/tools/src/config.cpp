// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "adamrel/io.hpp"

namespace adamrel::cli {

namespace {

using KeyValues = std::vector<std::pair<const char*, const char*>>;

const KeyValues& schema() {
  static const KeyValues kSchema = {
      {"run.experiment", "none"},
      {"run.seeds", "0"},
      {"run.out_dir", "out"},
      {"run.threads", "1"},
      {"run.preset", "none"},
      {"run.code_version", ""},
      {"env.name", "gridworld"},
      {"env.width", "5"},
      {"env.height", "5"},
      {"env.start", "0,0"},
      {"env.goal", "4,4"},
      {"env.hazards", "1,1;2,3;3,1"},
      {"env.step_penalty", "-0.01"},
      {"env.goal_reward", "1"},
      {"env.hazard_penalty", "-1"},
      {"env.max_steps", "0"},
      {"optimizer.variant", "adam"},
      {"optimizer.learning_rate", "0.00025"},
      {"optimizer.beta1", "0.9"},
      {"optimizer.beta2", "0.999"},
      {"optimizer.eps", "1e-05"},
      {"optimizer.max_grad_norm", "0.5"},
      {"ppo.num_envs", "8"},
      {"ppo.rollout_steps", "128"},
      {"ppo.num_epochs", "4"},
      {"ppo.num_minibatches", "4"},
      {"ppo.gamma", "0.99"},
      {"ppo.gae_lambda", "0.95"},
      {"ppo.clip_eps", "0.1"},
      {"ppo.value_clip", "true"},
      {"ppo.normalize_advantages", "true"},
      {"ppo.entropy_coef", "0.01"},
      {"ppo.value_coef", "0.5"},
      {"ppo.hidden", "64,64"},
      {"ppo.activation", "tanh"},
      {"dqn.buffer_capacity", "50000"},
      {"dqn.batch_size", "32"},
      {"dqn.target_update_interval", "1000"},
      {"dqn.polyak_tau", "none"},
      {"dqn.gamma", "0.99"},
      {"dqn.epsilon_start", "1"},
      {"dqn.epsilon_end", "0.01"},
      {"dqn.exploration_fraction", "0.1"},
      {"dqn.learning_starts", "1000"},
      {"dqn.train_frequency", "4"},
      {"dqn.hidden", "64,64"},
      {"dqn.activation", "relu"},
      {"train.total_steps", "200000"},
      {"train.eval_interval", "5000"},
      {"train.stop_return", "none"},
      {"train.checkpoint", "true"},
      {"theory.k_values", "1,2,10,100,10000"},
      {"theory.t_max", "100"},
      {"theory.variants", "adam,adamrel"},
      {"theory.beta1", "0.9"},
      {"theory.beta2", "0.999"},
      {"analyze.chunk_length", "0"},
      {"analyze.variant", "auto"},
      {"analyze.k", "0"},
      {"compare.n_resamples", "2000"},
      {"compare.level", "0.95"},
      {"compare.bootstrap_seed", "0"},
      {"compare.last_n", "10"},
  };
  return kSchema;
}

const KeyValues kPpoGridworld = {
    {"env.name", "gridworld"}, {"train.total_steps", "200000"}, {"train.eval_interval", "4096"},
    {"ppo.num_envs", "8"},     {"ppo.rollout_steps", "128"},    {"ppo.clip_eps", "0.1"},
    {"optimizer.eps", "1e-05"}};
const KeyValues kPpoCartpole = {
    {"env.name", "cartpole"}, {"train.total_steps", "500000"}, {"train.eval_interval", "16384"},
    {"optimizer.eps", "1e-05"}};
const KeyValues kAdamPpo = {{"optimizer.variant", "adam"},
                            {"optimizer.learning_rate", "0.00025"},
                            {"optimizer.max_grad_norm", "0.5"},
                            {"ppo.gae_lambda", "0.95"}};
const KeyValues kRelPpo = {{"optimizer.variant", "adamrel"},
                           {"optimizer.learning_rate", "0.002"},
                           {"optimizer.max_grad_norm", "5.0"},
                           {"ppo.gae_lambda", "0.9"}};
const KeyValues kDqnGridworld = {
    {"env.name", "gridworld"},         {"train.total_steps", "300000"},
    {"train.eval_interval", "5000"},   {"dqn.buffer_capacity", "50000"},
    {"dqn.learning_starts", "1000"},   {"dqn.target_update_interval", "1000"},
    {"dqn.batch_size", "32"},          {"dqn.train_frequency", "4"},
    {"dqn.exploration_fraction", "0.1"}, {"optimizer.max_grad_norm", "none"},
    {"optimizer.eps", "1e-05"},        {"optimizer.learning_rate", "0.0001"}};

struct Preset {
  const char* name;
  std::vector<const KeyValues*> layers;
  KeyValues extra;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> kPresets = {
      {"ppo-adam-gridworld", {&kPpoGridworld, &kAdamPpo}, {}},
      {"ppo-adamrel-gridworld", {&kPpoGridworld, &kRelPpo}, {}},
      {"ppo-adammr-gridworld", {&kPpoGridworld, &kRelPpo}, {{"optimizer.variant", "adammr"}}},
      {"ppo-adameqbetas-gridworld",
       {&kPpoGridworld, &kAdamPpo},
       {{"optimizer.variant", "adameqbetas"}, {"optimizer.beta1", "0.9"}, {"optimizer.beta2", "0.9"}}},
      {"ppo-adam-cartpole", {&kPpoCartpole, &kAdamPpo}, {}},
      {"ppo-adamrel-cartpole", {&kPpoCartpole, &kRelPpo}, {}},
      {"dqn-adam-gridworld", {&kDqnGridworld}, {{"optimizer.variant", "adam"}}},
      {"dqn-adamrel-gridworld", {&kDqnGridworld}, {{"optimizer.variant", "adamrel"}}},
      {"dqn-adammr-gridworld", {&kDqnGridworld}, {{"optimizer.variant", "adammr"}}},
      {"dqn-adam-polyak-gridworld",
       {&kDqnGridworld},
       {{"optimizer.variant", "adam"}, {"dqn.polyak_tau", "0.02"}, {"optimizer.learning_rate", "5e-05"}}},
      {"dqn-adamrel-polyak-gridworld",
       {&kDqnGridworld},
       {{"optimizer.variant", "adamrel"}, {"dqn.polyak_tau", "0.02"}, {"optimizer.learning_rate", "5e-05"}}},
      {"theory-default",
       {},
       {{"theory.k_values", "1,2,10,100,10000"}, {"theory.t_max", "100"},
        {"theory.variants", "adam,adamrel"}}},
  };
  return kPresets;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_none(std::string_view s) {
  const auto t = lower(io::trim(s));
  return t.empty() || t == "none";
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(message), key_(std::move(key)), line_(line) {}

RunConfig RunConfig::defaults() {
  RunConfig c;
  for (const auto& [k, v] : schema()) c.settings_[k] = Setting{v, "default", 0};
  return c;
}

bool RunConfig::is_known(std::string_view key) {
  return std::any_of(schema().begin(), schema().end(),
                     [&](const auto& kv) { return key == kv.first; });
}

void RunConfig::set(const std::string& key, std::string value, std::string origin, int line) {
  if (!is_known(key)) {
    std::string where = origin == "flag" || origin.rfind("preset:", 0) == 0
                            ? origin
                            : origin + ":" + std::to_string(line);
    throw ConfigError(key, line, "unknown config key '" + key + "' (" + where + ")");
  }
  settings_[key] = Setting{std::string(io::trim(value)), std::move(origin), line};
}

const Setting& RunConfig::setting(const std::string& key) const {
  const auto it = settings_.find(key);
  if (it == settings_.end()) throw ConfigError(key, 0, "unknown config key '" + key + "'");
  return it->second;
}

void RunConfig::fail(const std::string& key, const std::string& message) const {
  const auto& s = setting(key);
  std::string where = s.origin;
  if (s.line > 0) where += ":" + std::to_string(s.line);
  throw ConfigError(key, s.line, key + ": " + message + " (from " + where + ")");
}

double RunConfig::get_double(const std::string& key) const {
  const auto v = io::parse_double(raw(key));
  if (!v || !std::isfinite(*v)) fail(key, "expected a finite number, got '" + raw(key) + "'");
  return *v;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  const auto v = io::parse_int(raw(key));
  if (!v) fail(key, "expected an integer, got '" + raw(key) + "'");
  return *v;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  const auto v = get_int(key);
  if (v < 0) fail(key, "expected a nonnegative integer, got '" + raw(key) + "'");
  return static_cast<std::size_t>(v);
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto v = lower(raw(key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(key, "expected true or false, got '" + raw(key) + "'");
}

std::optional<double> RunConfig::get_optional_double(const std::string& key) const {
  if (is_none(raw(key))) return std::nullopt;
  return get_double(key);
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& part : io::split(raw(key), ',')) {
    const auto v = io::parse_double(io::trim(part));
    if (!v || !std::isfinite(*v)) fail(key, "bad number '" + part + "' in list");
    out.push_back(*v);
  }
  if (out.empty()) fail(key, "expected a nonempty comma-separated list");
  return out;
}

std::vector<std::size_t> RunConfig::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& part : io::split(raw(key), ',')) {
    const auto v = io::parse_int(io::trim(part));
    if (!v || *v <= 0) fail(key, "bad positive integer '" + part + "' in list");
    out.push_back(static_cast<std::size_t>(*v));
  }
  if (out.empty()) fail(key, "expected a nonempty comma-separated list");
  return out;
}

std::vector<std::uint64_t> RunConfig::seeds() const {
  std::vector<std::uint64_t> out;
  // Comma-separated seeds or inclusive ranges: "0,1,2" or "0-4,10".
  for (const auto& part : io::split(raw("run.seeds"), ',')) {
    const auto item = io::trim(part);
    const auto dash = item.find('-', 1);
    const auto lo = io::parse_int(item.substr(0, dash));
    const auto hi = dash == std::string_view::npos ? lo : io::parse_int(item.substr(dash + 1));
    if (!lo || !hi || *lo < 0 || *hi < *lo) fail("run.seeds", "bad seed '" + part + "'");
    for (auto v = *lo; v <= *hi; ++v) out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) fail("run.seeds", "at least one seed is required");
  return out;
}

std::string RunConfig::manifest() const {
  std::ostringstream out;
  out << "# adamrel run manifest\n";
  for (const auto& [k, s] : settings_) out << k << " = " << s.value << '\n';
  return out.str();
}

namespace {

std::vector<ConfigEntry> read_config_lines(std::istream& in, const std::string& origin) {
  std::vector<ConfigEntry> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = io::trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(text), number,
                        origin + ":" + std::to_string(number) + ": expected 'key = value'");
    ConfigEntry e{std::string(io::trim(text.substr(0, eq))),
                  std::string(io::trim(text.substr(eq + 1))), number};
    if (!RunConfig::is_known(e.key))
      throw ConfigError(e.key, number, "unknown config key '" + e.key + "' (" + origin + ":" +
                                           std::to_string(number) + ")");
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

void apply_config_text(RunConfig& config, std::istream& in, const std::string& origin) {
  for (auto& e : read_config_lines(in, origin)) config.set(e.key, e.value, origin, e.line);
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", 0, "cannot open config file '" + path + "'");
  return read_config_lines(in, path);
}

void apply_assignment(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(assignment), 0,
                      "--set expects key=value, got '" + std::string(assignment) + "'");
  config.set(std::string(io::trim(assignment.substr(0, eq))),
             std::string(assignment.substr(eq + 1)), "flag");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.emplace_back(p.name);
  return names;
}

void apply_preset(RunConfig& config, const std::string& name) {
  const auto it = std::find_if(presets().begin(), presets().end(),
                               [&](const Preset& p) { return name == p.name; });
  if (it == presets().end()) throw ConfigError("run.preset", 0, "unknown preset '" + name + "'");
  const std::string origin = "preset:" + name;
  for (const auto* layer : it->layers)
    for (const auto& [k, v] : *layer) config.set(k, v, origin);
  for (const auto& [k, v] : it->extra) config.set(k, v, origin);
  config.set("run.preset", name, origin);
}

namespace {

template <typename Fn>
auto checked(const char* section, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(section, 0, err.what());
  }
}

nn::Activation activation(const RunConfig& c, const std::string& key) {
  const auto v = lower(c.raw(key));
  if (v == "tanh") return nn::Activation::Tanh;
  if (v == "relu") return nn::Activation::ReLU;
  throw ConfigError(key, c.setting(key).line, key + ": expected tanh or relu, got '" + v + "'");
}

envs::Cell cell(const RunConfig& c, const std::string& key, std::string_view text) {
  const auto parts = io::split(text, ',');
  std::optional<long long> x, y;
  if (parts.size() == 2) {
    x = io::parse_int(io::trim(parts[0]));
    y = io::parse_int(io::trim(parts[1]));
  }
  if (!x || !y)
    throw ConfigError(key, c.setting(key).line,
                      key + ": expected a cell 'x,y', got '" + std::string(text) + "'");
  return {static_cast<int>(*x), static_cast<int>(*y)};
}

}  // namespace

optim::OptimizerConfig optimizer_config(const RunConfig& c) {
  optim::OptimizerConfig o;
  try {
    o.variant = optim::parse_variant(c.raw("optimizer.variant"));
  } catch (const std::invalid_argument& err) {
    throw ConfigError("optimizer.variant", c.setting("optimizer.variant").line, err.what());
  }
  o.alpha = c.get_double("optimizer.learning_rate");
  o.beta1 = c.get_double("optimizer.beta1");
  o.beta2 = c.get_double("optimizer.beta2");
  o.eps = c.get_double("optimizer.eps");
  o.max_grad_norm = c.get_optional_double("optimizer.max_grad_norm");
  if (o.max_grad_norm && *o.max_grad_norm == 0.0) o.max_grad_norm.reset();
  checked("optimizer", [&] {
    o.validate();
    return 0;
  });
  return o;
}

rl::PpoConfig ppo_config(const RunConfig& c) {
  rl::PpoConfig p;
  p.num_envs = c.get_size("ppo.num_envs");
  p.rollout_steps = c.get_size("ppo.rollout_steps");
  p.num_epochs = c.get_size("ppo.num_epochs");
  p.num_minibatches = c.get_size("ppo.num_minibatches");
  p.gamma = c.get_double("ppo.gamma");
  p.gae_lambda = c.get_double("ppo.gae_lambda");
  p.clip_eps = c.get_double("ppo.clip_eps");
  p.value_clip = c.get_bool("ppo.value_clip");
  p.normalize_advantages = c.get_bool("ppo.normalize_advantages");
  p.entropy_coef = c.get_double("ppo.entropy_coef");
  p.value_coef = c.get_double("ppo.value_coef");
  p.hidden = c.get_sizes("ppo.hidden");
  p.activation = activation(c, "ppo.activation");
  p.optimizer = optimizer_config(c);
  p.eval_interval = c.get_int("train.eval_interval");
  p.stop_return = c.get_optional_double("train.stop_return");
  checked("ppo", [&] {
    p.validate();
    return 0;
  });
  return p;
}

rl::DqnConfig dqn_config(const RunConfig& c) {
  rl::DqnConfig d;
  d.buffer_capacity = c.get_size("dqn.buffer_capacity");
  d.batch_size = c.get_size("dqn.batch_size");
  d.target_update_interval = c.get_int("dqn.target_update_interval");
  d.polyak_tau = c.get_optional_double("dqn.polyak_tau");
  d.gamma = c.get_double("dqn.gamma");
  d.epsilon_start = c.get_double("dqn.epsilon_start");
  d.epsilon_end = c.get_double("dqn.epsilon_end");
  d.exploration_fraction = c.get_double("dqn.exploration_fraction");
  d.learning_starts = c.get_int("dqn.learning_starts");
  d.train_frequency = c.get_int("dqn.train_frequency");
  d.hidden = c.get_sizes("dqn.hidden");
  d.activation = activation(c, "dqn.activation");
  d.optimizer = optimizer_config(c);
  d.eval_interval = c.get_int("train.eval_interval");
  d.stop_return = c.get_optional_double("train.stop_return");
  checked("dqn", [&] {
    d.validate();
    return 0;
  });
  return d;
}

std::unique_ptr<envs::Environment> make_environment(const RunConfig& c) {
  const auto name = lower(c.raw("env.name"));
  const auto max_steps = c.get_int("env.max_steps");
  if (max_steps < 0) throw ConfigError("env.max_steps", c.setting("env.max_steps").line,
                                       "env.max_steps: must be >= 0 (0 = environment default)");
  if (name == "gridworld") {
    envs::GridworldConfig g;
    g.width = static_cast<int>(c.get_int("env.width"));
    g.height = static_cast<int>(c.get_int("env.height"));
    g.start = cell(c, "env.start", c.raw("env.start"));
    g.goal = cell(c, "env.goal", c.raw("env.goal"));
    if (!is_none(c.raw("env.hazards")))
      for (const auto& part : io::split(c.raw("env.hazards"), ';'))
        g.hazards.push_back(cell(c, "env.hazards", io::trim(part)));
    g.step_penalty = c.get_double("env.step_penalty");
    g.goal_reward = c.get_double("env.goal_reward");
    g.hazard_penalty = c.get_double("env.hazard_penalty");
    if (max_steps > 0) g.max_steps = static_cast<int>(max_steps);
    return checked("env", [&] { return std::unique_ptr<envs::Environment>(std::make_unique<envs::Gridworld>(g)); });
  }
  if (name == "cartpole") {
    envs::CartPoleConfig cp;
    if (max_steps > 0) cp.max_steps = static_cast<int>(max_steps);
    return checked("env", [&] { return std::unique_ptr<envs::Environment>(std::make_unique<envs::CartPole>(cp)); });
  }
  throw ConfigError("env.name", c.setting("env.name").line,
                    "env.name: expected gridworld or cartpole, got '" + name + "'");
}

std::vector<optim::Variant> theory_variants(const RunConfig& c) {
  std::vector<optim::Variant> out;
  for (const auto& part : io::split(c.raw("theory.variants"), ',')) {
    try {
      const auto v = optim::parse_variant(io::trim(part));
      if (v != optim::Variant::Adam && v != optim::Variant::AdamRel)
        throw std::invalid_argument("theory curves exist for adam and adamrel only");
      out.push_back(v);
    } catch (const std::invalid_argument& err) {
      throw ConfigError("theory.variants", c.setting("theory.variants").line,
                        std::string("theory.variants: ") + err.what());
    }
  }
  if (out.empty())
    throw ConfigError("theory.variants", c.setting("theory.variants").line,
                      "theory.variants: expected at least one variant");
  return out;
}

}  // namespace adamrel::cli
