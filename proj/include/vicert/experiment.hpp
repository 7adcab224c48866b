// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vicert/config.hpp"
#include "vicert/online.hpp"
#include "vicert/reduction.hpp"

namespace vicert {

// Truth-scale objects for one (model, resolution); reused across queries.
struct TruthWorkspace {
  AffineTruthModel model;
  BFactor bfactor;
  DualAffineModel dual;

  explicit TruthWorkspace(const ModelSpec& spec)
      : model(assemble_model(spec)),
        bfactor(factorize_B(model)),
        dual(assemble_dual_affine(model, bfactor)) {}
};

// One certified online query; truth comparison filled when a truth solution
// is supplied.
struct CertifiedResult {
  double mu = 0.0;
  OnlinePrimalSolution primal;
  OnlineDualSolution dual;
  PrimalDualBound prdu;
  PrimalOnlyBound pr;
  double t_primal_solve = 0.0;
  double t_dual_solve = 0.0;
  double feasibility_violation_du = 0.0;
  double feasibility_violation_pr = 0.0;
  bool has_truth = false;
  double err_u_pr = 0.0, err_u_du = 0.0, err_lambda = 0.0;
  double norm_u = 0.0, norm_lambda = 0.0;
};

CertifiedResult run_online_query(const TruthWorkspace& ws, const OfflineArtifact& artifact,
                                 double mu, const KktSolution* truth = nullptr);

KktSolution solve_truth(const TruthWorkspace& ws, double mu, const LcpOptions& opts = {});

struct SweepRow {
  int n = 0, n_v = 0, n_q = 0, n_s = 0;
  double err_u_pr = 0, bnd_u_pr = 0, err_u_prdu = 0, bnd_u_prdu = 0;
  double err_l = 0, bnd_l_pr = 0, bnd_l_prdu = 0;
};

struct SweepDetailRow {
  int n = 0;
  double mu = 0;
  double err_u_pr = 0, bnd_u_pr = 0, err_u_prdu = 0, bnd_u_prdu = 0;
  double err_l = 0, bnd_l_pr = 0, bnd_l_prdu = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepDetailRow> detail;
  std::vector<std::string> log;
};

// Error/bound sweep over the n schedule against 250 (default) test
// parameters; truth solves are parallel over parameters, rows deterministic.
SweepResult run_sweep(const ExperimentConfig& config);

struct TimingRow {
  int model = 0, resolution = 0, truth_dim = 0;
  int n = 0, n_v = 0, n_q = 0, n_s = 0, reps = 0;
  double t_primal_only = 0.0;  // avg seconds: approximation + primal-only bound
  double t_primal_dual = 0.0;  // avg seconds: approximation + primal-dual bound
  std::uint64_t ops_primal_only = 0;   // solve + bound, size-weighted work
  std::uint64_t ops_primal_dual = 0;   // solve + bound, size-weighted work
  std::uint64_t ops_prdu_bound = 0;    // bound evaluation alone (iteration-free)
};

struct TimingResult {
  std::vector<TimingRow> rows;
  std::vector<std::string> log;
};

// Average online times per family; multiple resolutions give the
// mesh-scaling comparison at fixed n.
TimingResult run_timing(const ExperimentConfig& config);

// CSV output: fixed column order, %.17g doubles, deterministic bytes.
std::string format_csv_double(double v);
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_sweep_detail_csv(const SweepResult& result, const std::filesystem::path& path);
void write_timing_csv(const TimingResult& result, const std::filesystem::path& path);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

extern const std::vector<std::string> kSweepColumns;
extern const std::vector<std::string> kSweepDetailColumns;
extern const std::vector<std::string> kTimingColumns;

}  // namespace vicert
