// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: offline builds, certified online queries, error/bound
// sweeps, timing studies, and the invariant verification suite.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "vicert/experiment.hpp"
#include "vicert/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vicert;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerification = 3;

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["model"] = c.model;
  j["resolution"] = c.resolution;
  j["resolutions"] = c.resolutions;
  j["snapshots"] = c.snapshot_counts;
  j["test_samples"] = c.test_samples;
  j["tol_scale"] = c.tol_scale;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["with_truth"] = c.with_truth;
  j["detail"] = c.detail;
  if (!c.artifact.empty()) j["artifact"] = c.artifact;
  if (c.mu_set) j["mu"] = c.mu;
  return j;
}

void write_manifest(const ExperimentConfig& config, const std::string& command,
                    const std::vector<std::string>& outputs) {
  fs::create_directories(config.out_dir);
  json manifest;
  manifest["tool"] = "vicert";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["config"] = config_to_json(config);
  manifest["outputs"] = outputs;
  std::ofstream out(fs::path(config.out_dir) / ("manifest_" + command + ".json"));
  out << manifest.dump(2) << "\n";
}

std::string artifact_name(const ExperimentConfig& config, int n) {
  std::ostringstream name;
  name << "artifact_m" << config.model << "_r"
       << ModelSpec{config.model, config.resolution, std::nullopt}.effective_resolution() << "_n"
       << n << ".rb";
  return name.str();
}

void attach_common_flags(CLI::App* cmd, ExperimentConfig& config, std::string& config_file) {
  cmd->add_option("--config", config_file, "flat key=value config file (CLI flags override)");
  cmd->add_option("--model", config.model, "model id (1 or 2)");
  cmd->add_option("--resolution", config.resolutions,
                  "mesh resolution; comma-separate for timing scaling runs")
      ->delimiter(',');
  cmd->add_option("--snapshots", config.snapshot_counts,
                  "snapshot counts n (single value or comma-separated schedule)")
      ->delimiter(',');
  cmd->add_option("--test-samples", config.test_samples, "number of test parameters");
  cmd->add_option("--out-dir", config.out_dir, "output directory");
  cmd->add_option("--seed", config.seed, "RNG seed for test-sample draws");
  cmd->add_option("--reps", config.reps, "timing repetitions");
  cmd->add_flag("--with-truth", config.with_truth, "compare online results against truth solves");
  cmd->add_flag("--detail", config.detail, "emit the per-parameter sweep table");
  cmd->add_option("--tol-scale", config.tol_scale, "scales verification tolerances");
}

// The --resolution handler above collects into `resolutions`; fold a single
// entry back into the scalar field.
void finalize_resolutions(ExperimentConfig& config) {
  if (config.resolutions.size() == 1) {
    config.resolution = config.resolutions.front();
    config.resolutions.clear();
  }
}

int cmd_offline(const ExperimentConfig& config) {
  config.validate_counts();
  if (config.snapshot_counts.size() != 1) {
    throw ValidationError("offline expects exactly one --snapshots value");
  }
  const int n = config.snapshot_counts.front();
  const ModelSpec spec{config.model, config.resolution, std::nullopt};
  const TruthWorkspace ws(spec);

  const std::vector<double> params = equidistant_parameters(ws.model.parameter_box, n);
  const SnapshotSet snaps = generate_snapshots(ws.model, params);
  const SpaceOptions space_opts;
  OfflineArtifact artifact;
  artifact.spec = ws.model.spec;
  artifact.parameter_box = ws.model.parameter_box;
  artifact.snapshot_parameters = params;
  artifact.primal = build_primal_space(snaps, ws.model, space_opts);
  artifact.dual = build_dual_space(snaps, space_opts);
  artifact.ops = reduce_operators(ws.model, ws.dual, ws.bfactor, artifact.primal, artifact.dual);
  artifact.cert = build_certification(ws.model, ws.dual, ws.bfactor, artifact.primal,
                                      artifact.dual);

  fs::create_directories(config.out_dir);
  const std::string name = artifact_name(config, n);
  const fs::path artifact_path = fs::path(config.out_dir) / name;
  save_offline(artifact, artifact_path);

  const fs::path log_path = fs::path(config.out_dir) / (name + ".log");
  std::ofstream log(log_path);
  log << "model " << config.model << ", truth dimension " << ws.model.dim_v() << "\n";
  log << "snapshots (n = " << n << "):\n";
  for (int i = 0; i < snaps.size(); ++i) {
    log << "  mu = " << format_csv_double(snaps.parameters[i])
        << "  active-set sweeps = " << snaps.iterations[i]
        << "  kkt residual = " << format_csv_double(snaps.kkt_residuals[i]) << "\n";
  }
  log << "basis dimensions: n_v = " << artifact.n_v() << " (supremizers "
      << artifact.primal.supremizer_count << "), n_q = " << artifact.n_q()
      << ", n_s = " << artifact.n_s() << "\n";
  log << "dropped multiplier snapshots: " << (snaps.size() - artifact.n_q())
      << ", dropped slack snapshots: " << (snaps.size() - artifact.n_s())
      << " (drop tolerance " << format_csv_double(space_opts.drop_tolerance) << ")\n";
  log << "inf-sup constant beta = " << format_csv_double(artifact.cert.beta) << "\n";

  write_manifest(config, "offline", {name, name + ".log"});
  std::cout << "wrote " << artifact_path.string() << " (n_v = " << artifact.n_v()
            << ", n_q = " << artifact.n_q() << ", n_s = " << artifact.n_s() << ")\n";
  return kExitOk;
}

json bound_to_json(const PrimalDualBound& b) {
  return json{{"delta_u", b.delta_u},   {"delta_lambda", b.delta_lambda},
              {"residual_norm", b.residual_norm}, {"d1", b.d1},
              {"d2", b.d2},             {"seconds", b.seconds}};
}

json bound_to_json(const PrimalOnlyBound& b) {
  return json{{"delta_u", b.delta_u}, {"delta_lambda", b.delta_lambda},
              {"delta0", b.delta0},   {"delta1", b.delta1},
              {"delta2", b.delta2},   {"c1", b.c1},
              {"c2", b.c2},           {"seconds", b.seconds}};
}

int cmd_online(const ExperimentConfig& config) {
  if (config.artifact.empty()) throw ValidationError("online requires --artifact");
  if (!config.mu_set) throw ValidationError("online requires --mu");
  const OfflineArtifact artifact = load_offline(config.artifact);
  const TruthWorkspace ws(artifact.spec);

  std::optional<KktSolution> truth;
  if (config.with_truth) truth = solve_truth(ws, config.mu);
  const CertifiedResult res =
      run_online_query(ws, artifact, config.mu, truth ? &*truth : nullptr);

  json out;
  out["mu"] = res.mu;
  out["n_v"] = artifact.n_v();
  out["n_q"] = artifact.n_q();
  out["n_s"] = artifact.n_s();
  out["u_coeff"] = std::vector<double>(res.primal.u_coeff.begin(), res.primal.u_coeff.end());
  out["lambda_coeff"] =
      std::vector<double>(res.primal.lambda_coeff.begin(), res.primal.lambda_coeff.end());
  out["s_coeff"] = std::vector<double>(res.dual.s_coeff.begin(), res.dual.s_coeff.end());
  out["primal_dual_bound"] = bound_to_json(res.prdu);
  out["primal_only_bound"] = bound_to_json(res.pr);
  out["t_primal_solve"] = res.t_primal_solve;
  out["t_dual_solve"] = res.t_dual_solve;
  out["feasibility_violation_du"] = res.feasibility_violation_du;
  out["feasibility_violation_pr"] = res.feasibility_violation_pr;
  if (res.has_truth) {
    out["truth"] = json{{"err_u_pr", res.err_u_pr},
                        {"err_u_prdu", res.err_u_du},
                        {"err_lambda", res.err_lambda},
                        {"norm_u", res.norm_u},
                        {"norm_lambda", res.norm_lambda}};
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config) {
  const SweepResult result = run_sweep(config);
  fs::create_directories(config.out_dir);
  std::ostringstream base;
  base << "sweep_m" << config.model;
  std::vector<std::string> outputs;
  const std::string csv_name = base.str() + ".csv";
  write_sweep_csv(result, fs::path(config.out_dir) / csv_name);
  outputs.push_back(csv_name);
  if (config.detail) {
    const std::string detail_name = base.str() + "_detail.csv";
    write_sweep_detail_csv(result, fs::path(config.out_dir) / detail_name);
    outputs.push_back(detail_name);
  }
  for (const std::string& line : result.log) std::cerr << line << "\n";
  write_manifest(config, "sweep", outputs);
  std::cout << "wrote " << (fs::path(config.out_dir) / csv_name).string() << " ("
            << result.rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_timing(const ExperimentConfig& config) {
  const TimingResult result = run_timing(config);
  fs::create_directories(config.out_dir);
  std::ostringstream base;
  base << "timing_m" << config.model;
  const std::string csv_name = base.str() + ".csv";
  write_timing_csv(result, fs::path(config.out_dir) / csv_name);
  for (const std::string& line : result.log) std::cerr << line << "\n";
  write_manifest(config, "timing", {csv_name});
  std::cout << "wrote " << (fs::path(config.out_dir) / csv_name).string() << " ("
            << result.rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& config) {
  const std::vector<CheckResult> results = run_verification(config);
  int failures = 0;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    if (!r.pass) ++failures;
  }
  std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
  return failures == 0 ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified reduced-basis solver for parametrized obstacle problems"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string config_file;

  CLI::App* offline = app.add_subcommand("offline", "build and persist the offline artifact");
  CLI::App* online = app.add_subcommand("online", "certified online query against an artifact");
  online->add_option("--artifact", config.artifact, "offline artifact path");
  online->add_option("--mu", config.mu, "query parameter")->each([&config](const std::string&) {
    config.mu_set = true;
  });
  CLI::App* sweep = app.add_subcommand("sweep", "error/bound sweep over an n schedule");
  CLI::App* timing = app.add_subcommand("timing", "online timing study (per n and per mesh)");
  CLI::App* verify = app.add_subcommand("verify", "run the invariant verification suite");
  for (CLI::App* cmd : {offline, online, sweep, timing, verify}) {
    attach_common_flags(cmd, config, config_file);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!config_file.empty()) {
      // File values fill in anything not set on the command line; CLI flags
      // win, so re-parse them on top of the file-loaded config.
      ExperimentConfig file_config;
      apply_config_file(file_config, config_file);
      ExperimentConfig merged = file_config;
      // Command-line values already live in `config`; prefer non-defaults.
      const ExperimentConfig defaults;
      if (config.model != defaults.model) merged.model = config.model;
      if (config.resolution != defaults.resolution) merged.resolution = config.resolution;
      if (!config.resolutions.empty()) merged.resolutions = config.resolutions;
      if (!config.snapshot_counts.empty()) merged.snapshot_counts = config.snapshot_counts;
      if (config.test_samples != defaults.test_samples) merged.test_samples = config.test_samples;
      if (config.tol_scale != defaults.tol_scale) merged.tol_scale = config.tol_scale;
      if (config.out_dir != defaults.out_dir) merged.out_dir = config.out_dir;
      if (config.seed != defaults.seed) merged.seed = config.seed;
      if (config.reps != defaults.reps) merged.reps = config.reps;
      if (config.with_truth) merged.with_truth = true;
      if (config.detail) merged.detail = true;
      if (!config.artifact.empty()) merged.artifact = config.artifact;
      if (config.mu_set) {
        merged.mu = config.mu;
        merged.mu_set = true;
      }
      config = merged;
    }
    finalize_resolutions(config);

    if (offline->parsed()) return cmd_offline(config);
    if (online->parsed()) return cmd_online(config);
    if (sweep->parsed()) return cmd_sweep(config);
    if (timing->parsed()) return cmd_timing(config);
    if (verify->parsed()) return cmd_verify(config);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
}
