// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <sstream>

#include "vicert/errors.hpp"

namespace vicert {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("config key '" + key + "': cannot parse integer '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("config key '" + key + "': empty list");
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace

void ExperimentConfig::validate_counts() const {
  if (model != 1 && model != 2) throw ValidationError("model must be 1 or 2");
  for (const int n : snapshot_counts) {
    if (n < 1) throw ValidationError("snapshot count must be >= 1, got " + std::to_string(n));
  }
  if (test_samples < 1) throw ValidationError("test sample count must be >= 1");
  if (reps < 1) throw ValidationError("repetition count must be >= 1");
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "model") {
        config.model = std::stoi(value);
      } else if (key == "resolution") {
        config.resolution = std::stoi(value);
      } else if (key == "resolutions") {
        config.resolutions = parse_int_list(value, key);
      } else if (key == "snapshots") {
        config.snapshot_counts = parse_int_list(value, key);
      } else if (key == "test_samples") {
        config.test_samples = std::stoi(value);
      } else if (key == "tol_scale") {
        config.tol_scale = std::stod(value);
      } else if (key == "out_dir") {
        config.out_dir = value;
      } else if (key == "seed") {
        config.seed = std::stoull(value);
      } else if (key == "reps") {
        config.reps = std::stoi(value);
      } else if (key == "with_truth") {
        config.with_truth = parse_bool(value, key);
      } else if (key == "detail") {
        config.detail = parse_bool(value, key);
      } else if (key == "artifact") {
        config.artifact = value;
      } else if (key == "mu") {
        config.mu = std::stod(value);
        config.mu_set = true;
      } else {
        throw ValidationError("unknown config key '" + key + "' (line " +
                              std::to_string(lineno) + ")");
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError("config key '" + key + "': cannot parse value '" + value + "'");
    }
  }
}

std::vector<double> draw_test_parameters(const std::array<double, 2>& box, int count,
                                         std::uint64_t seed) {
  if (count < 1) throw ValidationError("test sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> samples;
  samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    // 53-bit uniform in [0,1); portable across standard libraries.
    const double t = static_cast<double>(rng() >> 11) * 0x1p-53;
    samples.push_back(box[0] + (box[1] - box[0]) * t);
  }
  std::sort(samples.begin(), samples.end());
  return samples;
}

}  // namespace vicert
