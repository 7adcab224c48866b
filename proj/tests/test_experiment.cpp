// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "vicert/experiment.hpp"
#include "vicert/verify.hpp"

using namespace vicert;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_sweep_config() {
  ExperimentConfig c;
  c.model = 1;
  c.resolution = 60;
  c.snapshot_counts = {2, 4, 6};
  c.test_samples = 30;
  c.seed = 99;
  c.detail = true;
  return c;
}

}  // namespace

TEST_CASE("config file: overrides and unknown-key rejection") {
  const fs::path path = fs::temp_directory_path() / "vicert_test_config.txt";
  {
    std::ofstream out(path);
    out << "# test config\n"
        << "model = 2\n"
        << "resolution = 16\n"
        << "snapshots = 2, 5, 10\n"
        << "seed = 7\n"
        << "with_truth = true\n";
  }
  ExperimentConfig c;
  apply_config_file(c, path);
  CHECK(c.model == 2);
  CHECK(c.resolution == 16);
  CHECK(c.snapshot_counts == std::vector<int>{2, 5, 10});
  CHECK(c.seed == 7);
  CHECK(c.with_truth);
  {
    std::ofstream out(path);
    out << "mystery_key = 3\n";
  }
  CHECK_THROWS_AS(apply_config_file(c, path), ValidationError);
  {
    std::ofstream out(path);
    out << "reps = not_a_number\n";
  }
  CHECK_THROWS_AS(apply_config_file(c, path), ValidationError);
  fs::remove(path);
}

TEST_CASE("config validation: counts must be positive") {
  ExperimentConfig c;
  c.snapshot_counts = {0};
  CHECK_THROWS_AS(c.validate_counts(), ValidationError);
  c.snapshot_counts = {3};
  c.test_samples = 0;
  CHECK_THROWS_AS(c.validate_counts(), ValidationError);
}

TEST_CASE("test parameter draws: deterministic, sorted, in the box") {
  const auto a = draw_test_parameters({0.001, 0.01}, 50, 123);
  const auto b = draw_test_parameters({0.001, 0.01}, 50, 123);
  CHECK(a == b);
  CHECK(std::is_sorted(a.begin(), a.end()));
  for (const double mu : a) {
    CHECK(mu >= 0.001);
    CHECK(mu <= 0.01);
  }
  CHECK(draw_test_parameters({0.0, 1.0}, 50, 1) != draw_test_parameters({0.0, 1.0}, 50, 2));
}

TEST_CASE("sweep: row-wise validity, coinciding errors, single-n edge") {
  const SweepResult sweep = run_sweep(small_sweep_config());
  REQUIRE(sweep.rows.size() == 3);
  for (const SweepRow& r : sweep.rows) {
    CHECK(r.bnd_u_pr >= r.err_u_pr);
    CHECK(r.bnd_u_prdu >= r.err_u_prdu);
    CHECK(r.bnd_l_pr >= r.err_l);
    CHECK(r.bnd_l_prdu >= r.err_l);
    // The two approximations track each other closely.
    const double ratio = r.err_u_pr / r.err_u_prdu;
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);
  }
  // Detail rows cover every (n, mu) pair.
  CHECK(sweep.detail.size() == 3 * 30);

  ExperimentConfig single = small_sweep_config();
  single.snapshot_counts = {1};
  single.test_samples = 5;
  const SweepResult one = run_sweep(single);
  CHECK(one.rows.size() == 1);
}

TEST_CASE("sweep CSV: documented schema and byte determinism") {
  const ExperimentConfig config = small_sweep_config();
  const SweepResult sweep = run_sweep(config);
  const fs::path dir = fs::temp_directory_path();
  const fs::path pa = dir / "vicert_sweep_a.csv";
  const fs::path pb = dir / "vicert_sweep_b.csv";
  write_sweep_csv(sweep, pa);
  write_sweep_csv(run_sweep(config), pb);

  const auto rows = read_csv(pa);
  REQUIRE_FALSE(rows.empty());
  REQUIRE(rows[0].size() == kSweepColumns.size());
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) CHECK(rows[0][i] == kSweepColumns[i]);
  CHECK(rows.size() == sweep.rows.size() + 1);
  // Round-trip parse equality of the formatted doubles.
  for (std::size_t r = 0; r < sweep.rows.size(); ++r) {
    CHECK(std::stod(rows[r + 1][4]) == sweep.rows[r].err_u_pr);
    CHECK(std::stod(rows[r + 1][10]) == sweep.rows[r].bnd_l_prdu);
  }

  std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(fa)),
                            std::istreambuf_iterator<char>());
  const std::string bytes_b((std::istreambuf_iterator<char>(fb)),
                            std::istreambuf_iterator<char>());
  CHECK(bytes_a == bytes_b);
  fs::remove(pa);
  fs::remove(pb);
}

TEST_CASE("timing: warns on reps=1 and reports positive averages") {
  ExperimentConfig c;
  c.model = 1;
  c.resolution = 40;
  c.snapshot_counts = {3};
  c.reps = 1;
  const TimingResult t = run_timing(c);
  REQUIRE(t.rows.size() == 1);
  CHECK_FALSE(t.log.empty());
  CHECK(t.rows[0].t_primal_only > 0.0);
  CHECK(t.rows[0].t_primal_dual > 0.0);
  CHECK(t.rows[0].ops_primal_dual > 0);

  const fs::path path = fs::temp_directory_path() / "vicert_timing.csv";
  write_timing_csv(t, path);
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].size() == kTimingColumns.size());
  fs::remove(path);
}

TEST_CASE("verification suite: all checks pass at the default tolerances") {
  ExperimentConfig c;
  const auto results = run_verification(c);
  CHECK(results.size() >= 20);
  for (const CheckResult& r : results) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("verification suite: zero tolerance scale reports failures") {
  ExperimentConfig c;
  c.tol_scale = 0.0;
  const auto results = run_verification(c);
  int failures = 0;
  for (const CheckResult& r : results) failures += r.pass ? 0 : 1;
  CHECK(failures > 0);
}
