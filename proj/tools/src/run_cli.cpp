// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "adamrel/cli/app.hpp"
#include "adamrel/errors.hpp"

#ifndef ADAMREL_VERSION
#define ADAMREL_VERSION "unknown"
#endif

namespace adamrel::cli {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailure = 1;

void add_common_options(CLI::App& sub, Invocation& inv) {
  sub.add_option("--config", inv.config_path, "Config file of 'key = value' lines");
  sub.add_option("--preset", inv.preset, "Named preset applied before the config file");
  sub.add_option("--seed", inv.seeds, "Seeds: comma-separated values or ranges such as 0-4");
  sub.add_option("--out", inv.out_dir, "Output directory");
  sub.add_option("--set", inv.assignments, "Override a key: --set optimizer.beta1=0.95")
      ->allow_extra_args(false);
}

void report(const Invocation& inv, const std::optional<std::string>& out_dir,
            const std::string& kind, const std::string& message, const std::string& key,
            int line) {
  nlohmann::json record = {{"status", "error"},
                           {"kind", kind},
                           {"command", inv.command},
                           {"message", message}};
  if (!key.empty()) record["key"] = key;
  if (line > 0) record["line"] = line;
  std::cerr << record.dump() << std::endl;
  if (!out_dir) return;
  std::error_code ec;
  std::filesystem::create_directories(*out_dir, ec);
  std::ofstream out(std::filesystem::path(*out_dir) / "error.json");
  if (out) out << record.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Adam-family optimizer experiments: theory curves, PPO/DQN training, analysis"};
  app.set_version_flag("--version", ADAMREL_VERSION);
  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "Print the built-in preset names and exit");

  Invocation inv;
  struct Sub {
    const char* name;
    const char* help;
    bool takes_inputs;
  };
  const Sub subs[] = {
      {"theory-curve", "Emit closed-form update-size curves", false},
      {"train-ppo", "Train PPO agents, one metrics CSV per seed", false},
      {"train-dqn", "Train DQN agents, one metrics CSV per seed", false},
      {"analyze", "Chunk-averaged gradient/update profile of run directories", true},
      {"compare", "IQM and stratified bootstrap CIs across run directories", true},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common_options(*sub, inv);
    if (s.takes_inputs) sub->add_option("inputs", inv.inputs, "Run directories")->required();
    sub->callback([&inv, name = std::string(s.name)] { inv.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report(inv, std::nullopt, "usage", e.what(), "", 0);
    return kExitConfig;
  }
  if (list_presets) {
    for (const auto& name : preset_names()) std::cout << name << '\n';
    return 0;
  }
  if (inv.command.empty()) {
    std::cerr << app.help();
    return kExitConfig;
  }

  std::optional<std::string> out_dir = inv.out_dir;
  try {
    const auto config = resolve_config(inv);
    out_dir = config.raw("run.out_dir");
    execute(config, inv.inputs, std::cout);
    return 0;
  } catch (const ConfigError& e) {
    report(inv, out_dir, "config", e.what(), e.key(), e.line());
    return kExitConfig;
  } catch (const PoisonedGradientError& e) {
    report(inv, out_dir, "poisoned_gradient", e.what(), "", 0);
  } catch (const InsufficientDataError& e) {
    report(inv, out_dir, "insufficient_data", e.what(), "", 0);
  } catch (const std::exception& e) {
    report(inv, out_dir, "runtime", e.what(), "", 0);
  }
  return kExitFailure;
}

}  // namespace adamrel::cli
