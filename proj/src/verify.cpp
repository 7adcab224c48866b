// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "vicert/experiment.hpp"
#include "vicert/op_counter.hpp"

namespace vicert {

namespace {

struct Suite {
  double tol_scale = 1.0;
  std::vector<CheckResult> results;

  void check(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }
  double tol(double base) const { return base * tol_scale; }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = static_cast<double>(rng() >> 11) * 0x1p-53 - 0.5;
  return v;
}

Matrix random_spd(std::mt19937_64& rng, Index n) {
  Matrix R(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) R(i, j) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
  }
  return R.transpose() * R + Matrix::Identity(n, n);
}

void check_stability_identity(Suite& s, const AffineTruthModel& model, const char* tag) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (const double mu : equidistant_parameters(model.parameter_box, 3)) {
    const AssembledOperators ops = assemble_at(model, mu);
    for (int k = 0; k < 10; ++k) {
      const Vector v = random_vector(rng, model.dim_v());
      const double num_ = v.dot(ops.A * v);
      const double den = v.dot(model.X_V * v);
      worst = std::max(worst, std::abs(num_ / den - mu) / mu);
    }
  }
  s.check(std::string("fe/rayleigh-stability-") + tag, worst <= s.tol(1e-12),
          "max relative deviation of a(v,v;mu)/||v||_V^2 from mu: " + num(worst));
}

void check_quadrature(Suite& s) {
  const AffineTruthModel model = assemble_model({1, 64, std::nullopt});
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Vector u = random_vector(rng, model.dim_v());
    // Trapezoid integral of the piecewise-linear interpolant (exact).
    double integral = 0.0;
    for (const auto& seg : model.mesh.segments) {
      const double h = model.mesh.nodes[seg[1]][0] - model.mesh.nodes[seg[0]][0];
      const int d0 = model.mesh.dof_of_node[seg[0]];
      const int d1 = model.mesh.dof_of_node[seg[1]];
      const double u0 = d0 >= 0 ? u[d0] : 0.0;
      const double u1 = d1 >= 0 ? u[d1] : 0.0;
      integral += 0.5 * h * (u0 + u1);
    }
    const double assembled = model.f_components[0].dot(u);
    worst = std::max(worst, std::abs(assembled + integral) / (1.0 + std::abs(integral)));
  }
  s.check("fe/quadrature-exactness", worst <= s.tol(1e-12),
          "max relative gap between f^1.u and -int(u): " + num(worst));
}

double interpolant_energy(const AffineTruthModel& model,
                          const std::function<double(double, double)>& v) {
  Vector vh(model.dim_v());
  for (Index k = 0; k < vh.size(); ++k) {
    const auto& p = model.mesh.nodes[model.mesh.interior[k]];
    vh[k] = v(p[0], p[1]);
  }
  return vh.dot(model.A_components[0] * vh);
}

void check_refinement(Suite& s) {
  {
    const auto quad = [](double x, double) { return x * (1.0 - x); };
    const double exact = 1.0 / 3.0;
    const double e1 = interpolant_energy(assemble_model({1, 32, std::nullopt}), quad);
    const double e2 = interpolant_energy(assemble_model({1, 64, std::nullopt}), quad);
    const double ratio = (exact - e1) / (exact - e2);
    s.check("fe/refinement-consistency-1d", ratio > 3.0 && ratio < 5.0,
            "energy defect ratio between h and h/2: " + num(ratio) + " (expect ~4)");
  }
  {
    const auto quad = [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); };
    const double exact = 2.0 / 90.0;
    const double e1 = interpolant_energy(assemble_model({2, 8, std::nullopt}), quad);
    const double e2 = interpolant_energy(assemble_model({2, 16, std::nullopt}), quad);
    const double ratio = (exact - e1) / (exact - e2);
    s.check("fe/refinement-consistency-2d", ratio > 3.0 && ratio < 5.0,
            "energy defect ratio between h and h/2: " + num(ratio) + " (expect ~4)");
  }
}

void check_lcp_oracle(Suite& s) {
  std::mt19937_64 rng(101);
  double worst_as = 0.0, worst_pgs = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const Index n = 2 + static_cast<Index>(rng() % 9);
    DenseLcp lcp{random_spd(rng, n), 4.0 * random_vector(rng, n)};
    const LcpSolution ref = solve_lcp_bruteforce(lcp);
    const LcpSolution as = solve_lcp_active_set(lcp);
    LcpOptions relax_opts;
    relax_opts.relaxation_iteration_factor = 400;
    const LcpSolution pgs = solve_lcp_projected_relaxation(lcp, relax_opts);
    worst_as = std::max(worst_as, (as.z - ref.z).lpNorm<Eigen::Infinity>());
    worst_pgs = std::max(worst_pgs, (pgs.z - ref.z).lpNorm<Eigen::Infinity>());
  }
  s.check("lcp/oracle-equivalence-active-set", worst_as <= s.tol(1e-8),
          "max |z - z*|_inf over 100 instances: " + num(worst_as));
  s.check("lcp/oracle-equivalence-relaxation", worst_pgs <= s.tol(1e-8),
          "max |z - z*|_inf over 100 instances: " + num(worst_pgs));
}

void check_kkt_closure(Suite& s) {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  double worst_gap = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 6, nq = 4;
    const Matrix A = random_spd(rng, n);
    Matrix B(nq, n);
    for (Index i = 0; i < nq; ++i) B.row(i) = random_vector(rng, n).transpose();
    const Vector f = random_vector(rng, n);
    const Vector g = random_vector(rng, nq);
    const KktSolution sol = solve_mixed_kkt(A, B, f, g);
    const double r1 = (A * sol.u + B.transpose() * sol.lambda - f).lpNorm<Eigen::Infinity>();
    const Vector slack = g - B * sol.u;
    const double r2 = std::max(0.0, -slack.minCoeff());
    const double r3 = std::max(0.0, -sol.lambda.minCoeff());
    worst = std::max({worst, r1, r2, r3});
    worst_gap = std::max(worst_gap, std::abs(slack.dot(sol.lambda)));
  }
  s.check("lcp/kkt-closure", worst <= s.tol(1e-8) && worst_gap <= s.tol(1e-8),
          "max KKT residual: " + num(worst) + ", max gap: " + num(worst_gap));
}

void check_complementarity_exact(Suite& s) {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 5;
    DenseLcp lcp{random_spd(rng, n), 4.0 * random_vector(rng, n)};
    const LcpSolution sol = solve_lcp_active_set(lcp);
    for (Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(sol.z[i] * sol.w[i]));
  }
  s.check("lcp/complementarity-exactness", worst <= s.tol(1e-30),
          "max |z_i w_i| at convergence: " + num(worst));
}

void check_slack_equivalence(Suite& s, const ModelSpec& spec, const char* tag) {
  const TruthWorkspace ws(spec);
  double worst = 0.0;
  for (const double mu : equidistant_parameters(ws.model.parameter_box, 4)) {
    const KktSolution primal = solve_truth(ws, mu);
    const Vector sdu = solve_truth_dual(ws.model, ws.dual, mu);
    const AssembledOperators ops = assemble_at(ws.model, mu);
    const Vector udu = primal_from_slack(sdu, ops.g, ws.bfactor);
    worst = std::max(worst, v_norm(ws.model, udu - primal.u) / v_norm(ws.model, primal.u));
  }
  s.check(std::string("slack/truth-equivalence-") + tag, worst <= s.tol(1e-8),
          "max relative V-norm gap between the primal and dual routes: " + num(worst));
}

void check_slack_feasibility(Suite& s) {
  const TruthWorkspace ws(ModelSpec{2, 8, std::nullopt});
  std::mt19937_64 rng(23);
  double worst = -1.0;
  bool all_pass = true;
  for (int k = 0; k < 10; ++k) {
    const double mu = 0.45 + 0.1 * (static_cast<double>(rng() >> 11) * 0x1p-53);
    const AssembledOperators ops = assemble_at(ws.model, mu);
    Vector sigma = random_vector(rng, ws.model.dim_q()).cwiseAbs();
    const Vector u = primal_from_slack(sigma, ops.g, ws.bfactor);
    const FeasibilityReport rep = check_feasibility(u, ws.model, mu);
    all_pass = all_pass && rep.pass;
    worst = std::max(worst, rep.max_violation);
  }
  s.check("slack/feasibility-map", all_pass,
          "max constraint violation of B^{-1}(g - sigma): " + num(worst));
}

void check_ftilde_bookkeeping(Suite& s) {
  const TruthWorkspace ws(ModelSpec{1, 40, std::nullopt});
  std::mt19937_64 rng(29);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double t = static_cast<double>(rng() >> 11) * 0x1p-53;
    const double mu = ws.model.parameter_box[0] +
                      (ws.model.parameter_box[1] - ws.model.parameter_box[0]) * t;
    const ThetaValues theta = evaluate_theta(ws.model, mu);
    const Vector assembled = ws.dual.ftilde_at(theta);
    const AssembledOperators ops = assemble_at(ws.model, mu);
    const Vector direct =
        ws.bfactor.solve_transpose(ops.A * ws.bfactor.solve(ops.g)) -
        ws.bfactor.solve_transpose(ops.f);
    worst = std::max(worst, (assembled - direct).norm() / direct.norm());
  }
  s.check("slack/ftilde-bookkeeping", worst <= s.tol(1e-12),
          "max relative gap between expanded and direct ftilde(mu): " + num(worst));
}

void check_reduction(Suite& s) {
  const TruthWorkspace ws(ModelSpec{1, 100, std::nullopt});
  const SnapshotSet snaps =
      generate_snapshots(ws.model, equidistant_parameters(ws.model.parameter_box, 8));
  const PrimalRBSpace primal = build_primal_space(snaps, ws.model);
  const DualRBSpace dual_space = build_dual_space(snaps);
  const ReducedOperators ops =
      reduce_operators(ws.model, ws.dual, ws.bfactor, primal, dual_space);
  const CertificationData cert =
      build_certification(ws.model, ws.dual, ws.bfactor, primal, dual_space);

  {
    const Matrix gram = primal.phi.transpose() * (ws.model.X_V * primal.phi);
    const double dev = (gram - Matrix::Identity(gram.rows(), gram.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    s.check("offline/gram-schmidt", dev <= s.tol(1e-10),
            "||phi^T X phi - I||_max = " + num(dev));
  }
  {
    OfflineArtifact art;
    art.spec = ws.model.spec;
    art.parameter_box = ws.model.parameter_box;
    art.snapshot_parameters = snaps.parameters;
    art.primal = primal;
    art.dual = dual_space;
    art.ops = ops;
    art.cert = cert;

    double worst = 0.0;
    for (int i = 0; i < snaps.size(); ++i) {
      const OnlineDualSolution sol = solve_dual_rb(art, snaps.parameters[i]);
      const Vector sn = dual_space.zeta * sol.s_coeff;
      worst = std::max(worst, (sn - snaps.slack[i]).norm() / snaps.slack[i].norm());
    }
    s.check("offline/snapshot-reproduction", worst <= s.tol(1e-8),
            "max relative slack reproduction error at snapshots: " + num(worst));

    // Online residual norms and pairings against direct truth-space values.
    std::mt19937_64 rng(31);
    Eigen::SimplicialLDLT<SparseMatrix> xsolver(ws.model.X_V);
    double worst_r = 0.0, worst_pair = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
      const double t = static_cast<double>(rng() >> 11) * 0x1p-53;
      const double mu = ws.model.parameter_box[0] +
                        (ws.model.parameter_box[1] - ws.model.parameter_box[0]) * t;
      const ThetaValues theta = evaluate_theta(ws.model, mu);
      const Vector sbar = random_vector(rng, dual_space.n_s()).cwiseAbs();
      const Vector lbar = random_vector(rng, primal.n_q()).cwiseAbs();

      ResidualCoefficients rc;
      rc.kind = ResidualCoefficients::Kind::primal_dual;
      rc.field_coeff = sbar;
      rc.lambda_coeff = lbar;
      const double online = residual_dual_norm(cert, theta, rc);

      const AssembledOperators at = assemble_at(ws.model, mu);
      const Vector u_du = ws.bfactor.solve(at.g - dual_space.zeta * sbar);
      const Vector r = at.f - at.A * u_du - ws.model.B.transpose() * (primal.psi * lbar);
      const double direct = std::sqrt(r.dot(xsolver.solve(r)));
      worst_r = std::max(worst_r, std::abs(online - direct) / direct);

      const double pair_online = lbar.dot(ops.pairing * sbar);
      const double pair_direct = (primal.psi * lbar).dot(dual_space.zeta * sbar);
      worst_pair = std::max(worst_pair,
                            std::abs(pair_online - pair_direct) / (1.0 + std::abs(pair_direct)));
    }
    s.check("offline/certification-consistency", worst_r <= s.tol(1e-8),
            "max relative gap between online and direct residual norms: " + num(worst_r));
    s.check("offline/pairing-consistency", worst_pair <= s.tol(1e-8),
            "max relative gap between online and direct pairings: " + num(worst_pair));

    // Fault injection: a corrupted Gramian must break the consistency check.
    OfflineArtifact corrupted = art;
    Index imax = 0, jmax = 0;
    corrupted.cert.primal_dual.hi.cwiseAbs().maxCoeff(&imax, &jmax);
    corrupted.cert.primal_dual.hi(imax, jmax) *= 1.5;
    bool detected = false;
    try {
      const double mu = snaps.parameters[3];
      const ThetaValues theta = evaluate_theta(ws.model, mu);
      ResidualCoefficients rc;
      rc.kind = ResidualCoefficients::Kind::primal_dual;
      rc.field_coeff = Vector::Ones(dual_space.n_s());
      rc.lambda_coeff = Vector::Ones(primal.n_q());
      const double online = residual_dual_norm(corrupted.cert, theta, rc);
      const AssembledOperators at = assemble_at(ws.model, mu);
      const Vector u_du = ws.bfactor.solve(at.g - dual_space.zeta * rc.field_coeff);
      const Vector r =
          at.f - at.A * u_du - ws.model.B.transpose() * (primal.psi * rc.lambda_coeff);
      const double direct = std::sqrt(r.dot(xsolver.solve(r)));
      detected = std::abs(online - direct) / direct > 1e-8;
    } catch (const SolverError&) {
      detected = true;  // negative quadratic form was caught
    }
    s.check("offline/gramian-fault-detection", detected,
            detected ? "corrupted Gramian changed the online residual norm"
                     : "corrupted Gramian went unnoticed");
  }

  {
    const Matrix BX = Matrix(ws.model.B) *
                      Matrix(ws.model.X_V).inverse() * Matrix(ws.model.B).transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (BX + BX.transpose()));
    const double beta_dense = std::sqrt(eig.eigenvalues().minCoeff());
    const double gap = std::abs(cert.beta - beta_dense) / beta_dense;
    s.check("offline/beta-oracle", cert.beta > 0.0 && gap <= s.tol(1e-10),
            "beta = " + num(cert.beta) + ", dense eigensolve gap: " + num(gap));
  }
}

void check_bound_validity(Suite& s) {
  const ExperimentConfig base = [] {
    ExperimentConfig c;
    c.model = 1;
    c.resolution = 100;
    c.snapshot_counts = {2, 4, 8};
    c.test_samples = 40;
    c.detail = true;
    return c;
  }();
  const SweepResult sweep = run_sweep(base);
  int violations_u = 0, violations_l = 0;
  for (const SweepDetailRow& d : sweep.detail) {
    if (d.bnd_u_pr < d.err_u_pr || d.bnd_u_prdu < d.err_u_prdu) ++violations_u;
    if (d.bnd_l_pr < d.err_l || d.bnd_l_prdu < d.err_l) ++violations_l;
  }
  s.check("online/bound-validity", violations_u == 0,
          std::to_string(violations_u) + " primal bound violations over " +
              std::to_string(sweep.detail.size()) + " queries");
  s.check("online/multiplier-bound-chain", violations_l == 0,
          std::to_string(violations_l) + " multiplier bound violations over " +
              std::to_string(sweep.detail.size()) + " queries");
}

void check_dual_feasibility(Suite& s) {
  const TruthWorkspace ws(ModelSpec{1, 100, std::nullopt});
  const OfflineArtifact art =
      build_offline(ws.model, equidistant_parameters(ws.model.parameter_box, 5));
  double worst = -1.0;
  bool all_pass = true;
  for (const double mu : draw_test_parameters(ws.model.parameter_box, 25, 5)) {
    const OnlineDualSolution sol = solve_dual_rb(art, mu);
    const Vector u_du = reconstruct_u_dual(art.dual, sol.s_coeff, ws.model, ws.bfactor, mu);
    const FeasibilityReport rep = check_feasibility(u_du, ws.model, mu);
    all_pass = all_pass && rep.pass;
    worst = std::max(worst, rep.max_violation);
  }
  s.check("online/dual-feasibility", all_pass,
          "max constraint violation of u_n from the slack route: " + num(worst));
}

void check_degenerate_limit(Suite& s) {
  // Obstacle raised out of reach: no contact anywhere, both bounds collapse
  // to the coercive residual bound and the reduced solve is plain Galerkin.
  TruthWorkspace raised(ModelSpec{2, 8, std::nullopt});
  raised.model.g_components[0].setConstant(10.0);
  const OfflineArtifact art =
      build_offline(raised.model, equidistant_parameters(raised.model.parameter_box, 3));
  const Index n_q = art.n_q();
  double worst_gal = 0.0, worst_bound = 0.0;
  for (const double mu : draw_test_parameters(raised.model.parameter_box, 5, 9)) {
    const OnlinePrimalSolution p = solve_primal_rb(art, mu);
    const OnlineDualSolution d = solve_dual_rb(art, mu);
    const PrimalDualBound b = primal_dual_bound(art, mu, p.lambda_coeff, d.s_coeff);
    const ThetaValues theta = evaluate_theta(raised.model, mu);
    // Unconstrained Galerkin reference in the same space.
    const Matrix A_n = theta.a[0] * art.ops.A_n[0];
    const Vector ubar = A_n.ldlt().solve(theta.f[0] * art.ops.f_n[0]);
    worst_gal = std::max(worst_gal, (ubar - p.u_coeff).norm() / ubar.norm());
    worst_bound =
        std::max(worst_bound, std::abs(b.delta_u - b.residual_norm / theta.a[0]) /
                                  (1.0 + b.delta_u));
  }
  s.check("online/degenerate-linear-limit",
          n_q == 0 && worst_gal <= s.tol(1e-10) && worst_bound <= s.tol(1e-12),
          "n_q = " + std::to_string(n_q) + ", Galerkin gap: " + num(worst_gal) +
              ", bound-vs-residual gap: " + num(worst_bound));
}

void check_pi_properties(Suite& s) {
  std::mt19937_64 rng(37);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vector q = 2.0 * random_vector(rng, 12);
    const Vector eta = random_vector(rng, 12).cwiseAbs();
    worst = std::max(worst, (q - project_onto_cone(q)).dot(eta));
  }
  s.check("online/cone-projection-variational", worst <= 0.0,
          "max (q - Pi(q), eta) over 1000 draws: " + num(worst));

  const TruthWorkspace ws(ModelSpec{1, 80, std::nullopt});
  double worst_pi = 0.0, worst_pair = -std::numeric_limits<double>::infinity();
  for (const double mu : equidistant_parameters(ws.model.parameter_box, 10)) {
    const KktSolution truth = solve_truth(ws, mu);
    const Vector e = detailed_inequality_residual(ws.model, mu, truth.u);
    worst_pi = std::max(worst_pi, project_onto_cone(e).lpNorm<Eigen::Infinity>());
    const Vector q = random_vector(rng, e.size()).cwiseAbs();
    worst_pair = std::max(worst_pair, q.dot(e));
  }
  s.check("online/cone-projection-truth", worst_pi <= s.tol(1e-12) && worst_pair <= s.tol(1e-12),
          "||Pi(e~)||_inf = " + num(worst_pi) + ", max (q, e~) = " + num(worst_pair));
}

void check_n_independence(Suite& s) {
  std::vector<std::uint64_t> bound_counts, total_counts;
  for (const int res : {12, 16, 20}) {
    const TruthWorkspace ws(ModelSpec{2, res, std::nullopt});
    const OfflineArtifact art =
        build_offline(ws.model, equidistant_parameters(ws.model.parameter_box, 3));
    OpCounter::reset();
    std::uint64_t bound = 0;
    for (const double mu : art.snapshot_parameters) {
      const OnlinePrimalSolution p = solve_primal_rb(art, mu);
      const OnlineDualSolution d = solve_dual_rb(art, mu);
      const std::uint64_t before = OpCounter::value();
      primal_dual_bound(art, mu, p.lambda_coeff, d.s_coeff);
      bound += OpCounter::value() - before;
    }
    bound_counts.push_back(bound);
    total_counts.push_back(OpCounter::value());
  }
  // The iteration-free bound evaluation counts identically; the solve adds a
  // data-dependent number of reduced active-set sweeps, bounded well below
  // any mesh-proportional growth.
  const bool bound_identical =
      bound_counts[0] == bound_counts[1] && bound_counts[1] == bound_counts[2];
  const std::uint64_t tmin = *std::min_element(total_counts.begin(), total_counts.end());
  const std::uint64_t tmax = *std::max_element(total_counts.begin(), total_counts.end());
  std::ostringstream detail;
  detail << "bound-path ops: " << bound_counts[0] << ", " << bound_counts[1] << ", "
         << bound_counts[2] << "; solve+bound ops: " << total_counts[0] << ", "
         << total_counts[1] << ", " << total_counts[2];
  s.check("online/n-independence", bound_identical && tmax < 2 * tmin, detail.str());
}

void check_csv(Suite& s, const ExperimentConfig& config) {
  ExperimentConfig small;
  small.model = 1;
  small.resolution = 60;
  small.snapshot_counts = {2, 3};
  small.test_samples = 10;
  small.seed = config.seed;
  const SweepResult a = run_sweep(small);
  const SweepResult b = run_sweep(small);

  const auto tmp = std::filesystem::temp_directory_path();
  const auto path_a = tmp / "vicert_verify_a.csv";
  const auto path_b = tmp / "vicert_verify_b.csv";
  write_sweep_csv(a, path_a);
  write_sweep_csv(b, path_b);

  const auto rows = read_csv(path_a);
  bool schema = !rows.empty() && rows[0].size() == kSweepColumns.size();
  if (schema) {
    for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
      schema = schema && rows[0][i] == kSweepColumns[i];
    }
  }
  s.check("cli/csv-schema", schema, "header row matches the documented column order");

  std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(fa)),
                            std::istreambuf_iterator<char>());
  const std::string bytes_b((std::istreambuf_iterator<char>(fb)),
                            std::istreambuf_iterator<char>());
  s.check("cli/determinism", !bytes_a.empty() && bytes_a == bytes_b,
          "two sweeps with the same config and seed produced identical CSV bytes");
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
}

}  // namespace

std::vector<CheckResult> run_verification(const ExperimentConfig& config) {
  Suite s;
  s.tol_scale = config.tol_scale;

  check_stability_identity(s, assemble_model({1, 64, std::nullopt}), "1d");
  check_stability_identity(s, assemble_model({2, 8, std::nullopt}), "2d");
  check_quadrature(s);
  check_refinement(s);
  check_lcp_oracle(s);
  check_kkt_closure(s);
  check_complementarity_exact(s);
  check_slack_equivalence(s, ModelSpec{1, 60, std::nullopt}, "1d");
  check_slack_equivalence(s, ModelSpec{2, 8, std::nullopt}, "2d");
  check_slack_feasibility(s);
  check_ftilde_bookkeeping(s);
  check_reduction(s);
  check_bound_validity(s);
  check_dual_feasibility(s);
  check_degenerate_limit(s);
  check_pi_properties(s);
  check_n_independence(s);
  check_csv(s, config);
  return s.results;
}

}  // namespace vicert
