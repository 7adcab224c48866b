// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vicert/errors.hpp"
#include "vicert/op_counter.hpp"
#include "vicert/parallel.hpp"

namespace vicert {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Keeps timed loops from being optimized away.
void consume(double value) { asm volatile("" : : "g"(value) : "memory"); }

double relative(double value, double norm) { return norm > 0.0 ? value / norm : 0.0; }

}  // namespace

KktSolution solve_truth(const TruthWorkspace& ws, double mu, const LcpOptions& opts) {
  const AssembledOperators ops = assemble_at(ws.model, mu);
  return solve_mixed_kkt(ops.A, ws.model.B, ops.f, ops.g, opts);
}

CertifiedResult run_online_query(const TruthWorkspace& ws, const OfflineArtifact& artifact,
                                 double mu, const KktSolution* truth) {
  CertifiedResult res;
  res.mu = mu;

  auto t0 = Clock::now();
  res.primal = solve_primal_rb(artifact, mu);
  res.t_primal_solve = seconds_since(t0);

  t0 = Clock::now();
  res.dual = solve_dual_rb(artifact, mu);
  res.t_dual_solve = seconds_since(t0);

  res.prdu = primal_dual_bound(artifact, mu, res.primal.lambda_coeff, res.dual.s_coeff);

  const Vector u_pr = reconstruct_u_primal(artifact, res.primal.u_coeff);
  res.pr = primal_only_bound(ws.model, artifact, mu, u_pr, res.primal.u_coeff,
                             res.primal.lambda_coeff);

  const Vector u_du =
      reconstruct_u_dual(artifact.dual, res.dual.s_coeff, ws.model, ws.bfactor, mu);
  res.feasibility_violation_du = check_feasibility(u_du, ws.model, mu).max_violation;
  res.feasibility_violation_pr = check_feasibility(u_pr, ws.model, mu).max_violation;

  if (truth != nullptr) {
    res.has_truth = true;
    res.norm_u = v_norm(ws.model, truth->u);
    res.norm_lambda = truth->lambda.norm();
    res.err_u_pr = v_norm(ws.model, truth->u - u_pr);
    res.err_u_du = v_norm(ws.model, truth->u - u_du);
    const Vector lambda_n = reconstruct_lambda(artifact, res.primal.lambda_coeff);
    res.err_lambda = (truth->lambda - lambda_n).norm();
  }
  return res;
}

const std::vector<std::string> kSweepColumns = {
    "n",        "n_v",      "n_q",        "n_s",        "err_u_pr", "bnd_u_pr",
    "err_u_prdu", "bnd_u_prdu", "err_l", "bnd_l_pr", "bnd_l_prdu"};

const std::vector<std::string> kSweepDetailColumns = {
    "n",        "mu",       "err_u_pr", "bnd_u_pr", "err_u_prdu",
    "bnd_u_prdu", "err_l",  "bnd_l_pr", "bnd_l_prdu"};

const std::vector<std::string> kTimingColumns = {
    "model", "resolution", "truth_dim",      "n",    "n_v",
    "n_q",   "n_s",        "reps",           "t_primal_only", "t_primal_dual",
    "ops_primal_only",     "ops_primal_dual", "ops_prdu_bound"};

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate_counts();
  if (config.snapshot_counts.empty()) {
    throw ValidationError("sweep requires a snapshot schedule (--snapshots n1,n2,...)");
  }
  ModelSpec spec{config.model, config.resolution, std::nullopt};
  const TruthWorkspace ws(spec);

  const std::vector<double> test_mus =
      draw_test_parameters(ws.model.parameter_box, config.test_samples, config.seed);

  std::vector<KktSolution> truth(test_mus.size());
  parallel_for(static_cast<int>(test_mus.size()),
               [&](int i) { truth[i] = solve_truth(ws, test_mus[i]); });

  SweepResult result;
  for (const int n : config.snapshot_counts) {
    const OfflineArtifact artifact =
        build_offline(ws.model, equidistant_parameters(ws.model.parameter_box, n));
    SweepRow row;
    row.n = n;
    row.n_v = static_cast<int>(artifact.n_v());
    row.n_q = static_cast<int>(artifact.n_q());
    row.n_s = static_cast<int>(artifact.n_s());
    int skipped_lambda = 0;
    for (std::size_t i = 0; i < test_mus.size(); ++i) {
      const CertifiedResult q = run_online_query(ws, artifact, test_mus[i], &truth[i]);
      SweepDetailRow d;
      d.n = n;
      d.mu = q.mu;
      d.err_u_pr = relative(q.err_u_pr, q.norm_u);
      d.bnd_u_pr = relative(q.pr.delta_u, q.norm_u);
      d.err_u_prdu = relative(q.err_u_du, q.norm_u);
      d.bnd_u_prdu = relative(q.prdu.delta_u, q.norm_u);
      row.err_u_pr = std::max(row.err_u_pr, d.err_u_pr);
      row.bnd_u_pr = std::max(row.bnd_u_pr, d.bnd_u_pr);
      row.err_u_prdu = std::max(row.err_u_prdu, d.err_u_prdu);
      row.bnd_u_prdu = std::max(row.bnd_u_prdu, d.bnd_u_prdu);
      if (q.norm_lambda > 0.0) {
        d.err_l = q.err_lambda / q.norm_lambda;
        d.bnd_l_pr = q.pr.delta_lambda / q.norm_lambda;
        d.bnd_l_prdu = q.prdu.delta_lambda / q.norm_lambda;
        row.err_l = std::max(row.err_l, d.err_l);
        row.bnd_l_pr = std::max(row.bnd_l_pr, d.bnd_l_pr);
        row.bnd_l_prdu = std::max(row.bnd_l_prdu, d.bnd_l_prdu);
      } else {
        ++skipped_lambda;
      }
      if (config.detail) result.detail.push_back(d);
    }
    if (skipped_lambda > 0) {
      std::ostringstream msg;
      msg << "n=" << n << ": skipped " << skipped_lambda
          << " parameters with ||lambda|| = 0 in the multiplier columns";
      result.log.push_back(msg.str());
    }
    result.rows.push_back(row);
  }
  return result;
}

TimingResult run_timing(const ExperimentConfig& config) {
  config.validate_counts();
  if (config.snapshot_counts.empty()) {
    throw ValidationError("timing requires a snapshot schedule (--snapshots n1,n2,...)");
  }
  TimingResult result;
  if (config.reps == 1) {
    result.log.push_back("warning: averaging over a single repetition; timings will be noisy");
  }
  std::vector<int> resolutions = config.resolutions;
  if (resolutions.empty()) resolutions.push_back(config.resolution);

  for (const int resolution : resolutions) {
    ModelSpec spec{config.model, resolution, std::nullopt};
    const TruthWorkspace ws(spec);

    for (const int n : config.snapshot_counts) {
      const OfflineArtifact artifact =
          build_offline(ws.model, equidistant_parameters(ws.model.parameter_box, n));
      // Probe at the snapshot parameters: a deterministic, mesh-independent
      // rule that keeps the instrumented counts comparable across meshes.
      const std::vector<double> probes = artifact.snapshot_parameters;
      const int n_probes = static_cast<int>(probes.size());
      TimingRow row;
      row.model = config.model;
      row.resolution = resolution;
      row.truth_dim = static_cast<int>(ws.model.dim_v());
      row.n = n;
      row.n_v = static_cast<int>(artifact.n_v());
      row.n_q = static_cast<int>(artifact.n_q());
      row.n_s = static_cast<int>(artifact.n_s());
      row.reps = config.reps;

      // Warm-up pass, also used for the instrumented operation counts.
      OpCounter::reset();
      std::uint64_t bound_ops = 0;
      for (const double mu : probes) {
        const OnlinePrimalSolution p = solve_primal_rb(artifact, mu);
        const OnlineDualSolution d = solve_dual_rb(artifact, mu);
        const std::uint64_t before_bound = OpCounter::value();
        const PrimalDualBound b = primal_dual_bound(artifact, mu, p.lambda_coeff, d.s_coeff);
        bound_ops += OpCounter::value() - before_bound;
        consume(b.delta_u);
      }
      row.ops_primal_dual = OpCounter::value();
      row.ops_prdu_bound = bound_ops;
      OpCounter::reset();
      for (const double mu : probes) {
        const OnlinePrimalSolution p = solve_primal_rb(artifact, mu);
        const Vector u_pr = reconstruct_u_primal(artifact, p.u_coeff);
        const PrimalOnlyBound b =
            primal_only_bound(ws.model, artifact, mu, u_pr, p.u_coeff, p.lambda_coeff);
        consume(b.delta_u);
      }
      row.ops_primal_only = OpCounter::value();

      auto t0 = Clock::now();
      for (int rep = 0; rep < config.reps; ++rep) {
        for (const double mu : probes) {
          const OnlinePrimalSolution p = solve_primal_rb(artifact, mu);
          const Vector u_pr = reconstruct_u_primal(artifact, p.u_coeff);
          const PrimalOnlyBound b =
              primal_only_bound(ws.model, artifact, mu, u_pr, p.u_coeff, p.lambda_coeff);
          consume(b.delta_u);
        }
      }
      row.t_primal_only = seconds_since(t0) / (config.reps * n_probes);

      t0 = Clock::now();
      for (int rep = 0; rep < config.reps; ++rep) {
        for (const double mu : probes) {
          const OnlinePrimalSolution p = solve_primal_rb(artifact, mu);
          const OnlineDualSolution d = solve_dual_rb(artifact, mu);
          const PrimalDualBound b = primal_dual_bound(artifact, mu, p.lambda_coeff, d.s_coeff);
          consume(b.delta_u);
        }
      }
      row.t_primal_dual = seconds_since(t0) / (config.reps * n_probes);

      result.rows.push_back(row);
    }
  }
  return result;
}

std::string format_csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_header(std::ofstream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << "\n";
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  write_header(out, kSweepColumns);
  for (const SweepRow& r : result.rows) {
    out << r.n << "," << r.n_v << "," << r.n_q << "," << r.n_s << ","
        << format_csv_double(r.err_u_pr) << "," << format_csv_double(r.bnd_u_pr) << ","
        << format_csv_double(r.err_u_prdu) << "," << format_csv_double(r.bnd_u_prdu) << ","
        << format_csv_double(r.err_l) << "," << format_csv_double(r.bnd_l_pr) << ","
        << format_csv_double(r.bnd_l_prdu) << "\n";
  }
}

void write_sweep_detail_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  write_header(out, kSweepDetailColumns);
  for (const SweepDetailRow& r : result.detail) {
    out << r.n << "," << format_csv_double(r.mu) << "," << format_csv_double(r.err_u_pr) << ","
        << format_csv_double(r.bnd_u_pr) << "," << format_csv_double(r.err_u_prdu) << ","
        << format_csv_double(r.bnd_u_prdu) << "," << format_csv_double(r.err_l) << ","
        << format_csv_double(r.bnd_l_pr) << "," << format_csv_double(r.bnd_l_prdu) << "\n";
  }
}

void write_timing_csv(const TimingResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  write_header(out, kTimingColumns);
  for (const TimingRow& r : result.rows) {
    out << r.model << "," << r.resolution << "," << r.truth_dim << "," << r.n << "," << r.n_v
        << "," << r.n_q << "," << r.n_s << "," << r.reps << ","
        << format_csv_double(r.t_primal_only) << "," << format_csv_double(r.t_primal_dual) << ","
        << r.ops_primal_only << "," << r.ops_primal_dual << "," << r.ops_prdu_bound << "\n";
  }
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace vicert
