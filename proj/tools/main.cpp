// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "adamrel/cli/app.hpp"

int main(int argc, char** argv) { return adamrel::cli::run_cli(argc, argv); }
