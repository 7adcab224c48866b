// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vicert {

// Experiment configuration shared by all CLI subcommands.  Values come from
// defaults, then an optional flat key=value config file, then command-line
// overrides; unknown file keys are rejected.
struct ExperimentConfig {
  int model = 1;
  int resolution = 0;                 // 0 -> model default (200 / 32)
  std::vector<int> resolutions;       // timing mesh-scaling schedule (empty -> {resolution})
  std::vector<int> snapshot_counts;   // n schedule (single entry for `offline`)
  int test_samples = 250;
  double tol_scale = 1.0;             // scales verification tolerances
  std::string out_dir = "out";
  std::uint64_t seed = 20260809;
  int reps = 10;
  bool with_truth = false;
  bool detail = false;                // per-parameter sweep table
  std::string artifact;               // `online`: artifact path
  double mu = 0.0;                    // `online`: query parameter
  bool mu_set = false;

  void validate_counts() const;  // counts >= 1 where required
};

// Parses `key = value` lines ('#' comments, blank lines allowed) and applies
// them; throws ValidationError on unknown keys or malformed values.
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

// Uniform test parameters in the box drawn from a seeded generator, sorted
// ascending (deterministic for a fixed seed on any platform).
std::vector<double> draw_test_parameters(const std::array<double, 2>& box, int count,
                                         std::uint64_t seed);

}  // namespace vicert
