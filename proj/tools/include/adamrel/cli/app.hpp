// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adamrel/cli/config.hpp"

namespace adamrel::cli {

/// What the command line asked for, before config resolution.
struct Invocation {
  std::string command;  // theory-curve | train-ppo | train-dqn | analyze | compare
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> seeds;
  std::optional<std::string> out_dir;
  std::vector<std::string> assignments;
  std::vector<std::string> inputs;
};

/// Defaults, then the preset (from --preset, else from the file's run.preset),
/// then the config file, then --seed/--out/--set.
RunConfig resolve_config(const Invocation& invocation);

/// Runs a resolved command, writing artifacts under run.out_dir. Progress
/// lines go to `log`.
void execute(const RunConfig& config, const std::vector<std::string>& inputs, std::ostream& log);

/// Full command-line entry point; returns the process exit status
/// (0 success, 2 configuration error, 1 any other failure).
int run_cli(int argc, char** argv);

}  // namespace adamrel::cli
