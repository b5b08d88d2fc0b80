// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

// Flat `section.key = value` run configuration for the adamrel tool.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adamrel/dqn.hpp"
#include "adamrel/envs.hpp"
#include "adamrel/optimizer.hpp"
#include "adamrel/ppo.hpp"

namespace adamrel::cli {

/// Bad configuration input. `line` is 0 when the value did not come from a file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

struct Setting {
  std::string value;
  std::string origin;  // "default", "preset:<name>", "<path>", "flag"
  int line = 0;
};

class RunConfig {
 public:
  /// Every known key at its built-in default.
  static RunConfig defaults();

  static bool is_known(std::string_view key);

  void set(const std::string& key, std::string value, std::string origin, int line = 0);
  const Setting& setting(const std::string& key) const;
  const std::string& raw(const std::string& key) const { return setting(key).value; }

  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// "none" or empty means unset.
  std::optional<double> get_optional_double(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;
  std::vector<std::uint64_t> seeds() const;

  /// Sorted `key = value` lines; loadable with apply_config_text.
  std::string manifest() const;

  const std::map<std::string, Setting>& settings() const { return settings_; }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  std::map<std::string, Setting> settings_;
};

/// Parses `key = value` lines ('#' starts a comment) and applies them.
void apply_config_text(RunConfig& config, std::istream& in, const std::string& origin);

/// Parses a file into (key, value, line) triples without applying them.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Applies `key=value` as given on the command line.
void apply_assignment(RunConfig& config, std::string_view assignment);

std::vector<std::string> preset_names();
void apply_preset(RunConfig& config, const std::string& name);

optim::OptimizerConfig optimizer_config(const RunConfig& config);
rl::PpoConfig ppo_config(const RunConfig& config);
rl::DqnConfig dqn_config(const RunConfig& config);
std::unique_ptr<envs::Environment> make_environment(const RunConfig& config);
std::vector<optim::Variant> theory_variants(const RunConfig& config);

}  // namespace adamrel::cli
