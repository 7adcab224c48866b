// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/SparseCholesky>

#include <random>

#include "vicert/experiment.hpp"
#include "vicert/online.hpp"
#include "vicert/op_counter.hpp"

using namespace vicert;

namespace {

OfflineArtifact make_artifact(const TruthWorkspace& ws, int n) {
  return build_offline(ws.model, equidistant_parameters(ws.model.parameter_box, n));
}

double x_norm(const AffineTruthModel& model, const Vector& v) { return v_norm(model, v); }

}  // namespace

TEST_CASE("cone projection: componentwise clip and variational property") {
  const Vector q = (Vector(3) << -1.0, 2.0, 0.0).finished();
  const Vector p = project_onto_cone(q);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 2.0);
  CHECK(p[2] == 0.0);
  CHECK((project_onto_cone(p) - p).isZero(0.0));       // identity on the cone
  CHECK(project_onto_cone(-p.cwiseAbs()).isZero(0.0)); // nonpositive input clips to zero

  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    Vector x(8), eta(8);
    for (double& v : x) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    for (double& v : eta) v = static_cast<double>(rng() >> 11) * 0x1p-53;
    CHECK((x - project_onto_cone(x)).dot(eta) <= 0.0);
  }
}

TEST_CASE("detailed inequality residual of a truth solution") {
  const TruthWorkspace ws(ModelSpec{1, 60, std::nullopt});
  std::mt19937_64 rng(2);
  for (const double mu : {0.002, 0.007}) {
    const KktSolution truth = solve_truth(ws, mu);
    const Vector e = detailed_inequality_residual(ws.model, mu, truth.u);
    CHECK(e.maxCoeff() <= 1e-12);  // e = -s up to solver roundoff
    CHECK(project_onto_cone(e).lpNorm<Eigen::Infinity>() <= 1e-12);  // Pi(e~) = 0
    CHECK((e + truth.slack).lpNorm<Eigen::Infinity>() <= 1e-12);
    Vector q(e.size());
    for (double& v : q) v = static_cast<double>(rng() >> 11) * 0x1p-53;
    CHECK(q.dot(e) <= 1e-12);  // (q, e~) <= 0 for q >= 0
  }
}

TEST_CASE("online primal: snapshot reproduction and inactive edge cases") {
  const TruthWorkspace ws(ModelSpec{1, 80, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 5);

  for (const double mu : art.snapshot_parameters) {
    const KktSolution truth = solve_truth(ws, mu);
    const OnlinePrimalSolution sol = solve_primal_rb(art, mu);
    CHECK(sol.lambda_coeff.minCoeff() >= 0.0);
    const Vector u_n = reconstruct_u_primal(art, sol.u_coeff);
    CHECK(x_norm(ws.model, u_n - truth.u) <= 1e-8 * x_norm(ws.model, truth.u));
    const Vector l_n = reconstruct_lambda(art, sol.lambda_coeff);
    CHECK((l_n - truth.lambda).norm() <= 1e-8 * truth.lambda.norm());
  }
}

TEST_CASE("online primal: empty cone reduces to unconstrained Galerkin") {
  TruthWorkspace raised(ModelSpec{2, 6, std::nullopt});
  raised.model.g_components[0].setConstant(10.0);
  const OfflineArtifact art = make_artifact(raised, 3);
  REQUIRE(art.n_q() == 0);
  const double mu = 0.48;
  const OnlinePrimalSolution sol = solve_primal_rb(art, mu);
  const ThetaValues theta = art.theta(mu);
  const Vector galerkin =
      (theta.a[0] * art.ops.A_n[0]).ldlt().solve(theta.f[0] * art.ops.f_n[0]);
  CHECK((sol.u_coeff - galerkin).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("online dual: snapshot reproduction with unit coordinates") {
  const TruthWorkspace ws(ModelSpec{1, 80, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 5);
  REQUIRE(art.n_s() == 5);
  for (std::size_t i = 0; i < art.snapshot_parameters.size(); ++i) {
    const OnlineDualSolution sol = solve_dual_rb(art, art.snapshot_parameters[i]);
    Vector unit = Vector::Zero(art.n_s());
    unit[static_cast<Index>(i)] = 1.0;
    CHECK((sol.s_coeff - unit).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(sol.multiplier.minCoeff() >= -1e-12);
    CHECK(sol.complementarity_gap <= 1e-10);
  }
}

TEST_CASE("online dual: nonpositive load clips to zero") {
  // Single-column artifact hand-modified so that ftilde_n <= 0.
  const TruthWorkspace ws(ModelSpec{2, 6, std::nullopt});
  OfflineArtifact art = make_artifact(ws, 1);
  REQUIRE(art.n_s() == 1);
  art.ops.ftilde_n[0].setConstant(-1.0);
  art.ops.ftilde_n[1].setConstant(-1.0);
  const OnlineDualSolution sol = solve_dual_rb(art, 0.5);
  CHECK(sol.s_coeff.isZero(0.0));

  // Scalar closed form: sbar = max(0, ftilde/Atilde).
  OfflineArtifact pos = make_artifact(ws, 1);
  const ThetaValues theta = pos.theta(0.5);
  const double atilde = theta.a[0] * pos.ops.Atilde_n[0](0, 0);
  const Vector coeff = (Vector(2) << theta.f[0], theta.a[0] * theta.g[0]).finished();
  const double ftilde = coeff[0] * pos.ops.ftilde_n[0][0] + coeff[1] * pos.ops.ftilde_n[1][0];
  const OnlineDualSolution sol2 = solve_dual_rb(pos, 0.5);
  CHECK(sol2.s_coeff[0] == doctest::Approx(std::max(0.0, ftilde / atilde)));
}

TEST_CASE("reconstruct_u_dual: feasibility and the slack round trip") {
  const TruthWorkspace ws(ModelSpec{2, 8, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 4);
  const double mu = 0.52;
  const OnlineDualSolution sol = solve_dual_rb(art, mu);
  const Vector u_du = reconstruct_u_dual(art.dual, sol.s_coeff, ws.model, ws.bfactor, mu);
  // Model 2: u <= 0.1 everywhere (B = I, g = 0.1).
  CHECK(u_du.maxCoeff() <= 0.1 + 1e-12);
  CHECK(check_feasibility(u_du, ws.model, mu).pass);
  // slack_from_primal recovers exactly the expanded reduced slack.
  const AssembledOperators at = assemble_at(ws.model, mu);
  const Vector s_round = slack_from_primal(u_du, at.g, ws.model.B);
  const Vector s_n = reconstruct_s(art, sol.s_coeff);
  CHECK((s_round - s_n).lpNorm<Eigen::Infinity>() <= 1e-14);

  // s = 0 maps to B^{-1} g.
  const Vector u0 =
      reconstruct_u_dual(art.dual, Vector::Zero(art.n_s()), ws.model, ws.bfactor, mu);
  CHECK((u0 - ws.bfactor.solve(at.g)).isZero(1e-14));
  CHECK_THROWS_AS(
      reconstruct_u_dual(art.dual, Vector::Constant(art.n_s(), -1.0), ws.model, ws.bfactor, mu),
      ValidationError);
}

TEST_CASE("residual dual norm: zero coefficients, single piece, direct oracle") {
  const TruthWorkspace ws(ModelSpec{1, 60, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 4);

  ThetaValues theta = art.theta(0.005);
  ResidualCoefficients rc;
  rc.kind = ResidualCoefficients::Kind::primal_dual;
  rc.field_coeff = Vector::Zero(art.n_s());
  rc.lambda_coeff = Vector::Zero(art.n_q());

  // All coefficients zero with theta_f = 0: the residual vanishes.
  ThetaValues zero_theta = theta;
  zero_theta.f.setZero();
  zero_theta.a.setZero();
  zero_theta.g.setZero();
  CHECK(residual_dual_norm(art.cert, zero_theta, rc) == 0.0);

  // Single f-piece: ||r|| = |theta_f| sqrt(f^T X^{-1} f).
  ThetaValues f_only = zero_theta;
  f_only.f[0] = 2.0;
  Eigen::SimplicialLDLT<SparseMatrix> xsolver(ws.model.X_V);
  const double f_norm =
      std::sqrt(ws.model.f_components[0].dot(xsolver.solve(ws.model.f_components[0])));
  CHECK(residual_dual_norm(art.cert, f_only, rc) == doctest::Approx(2.0 * f_norm));

  // Random bundles match the direct truth-space Riesz norm.
  std::mt19937_64 rng(4);
  for (int draw = 0; draw < 10; ++draw) {
    const double t = static_cast<double>(rng() >> 11) * 0x1p-53;
    const double mu = 0.001 + 0.009 * t;
    const ThetaValues th = art.theta(mu);
    Vector sbar(art.n_s()), lbar(art.n_q());
    for (double& v : sbar) v = static_cast<double>(rng() >> 11) * 0x1p-53;
    for (double& v : lbar) v = static_cast<double>(rng() >> 11) * 0x1p-53;
    ResidualCoefficients bundle{ResidualCoefficients::Kind::primal_dual, sbar, lbar};
    const double online = residual_dual_norm(art.cert, th, bundle);
    const AssembledOperators at = assemble_at(ws.model, mu);
    const Vector u_du = ws.bfactor.solve(at.g - art.dual.zeta * sbar);
    const Vector r = at.f - at.A * u_du - ws.model.B.transpose() * (art.primal.psi * lbar);
    const double direct = std::sqrt(r.dot(xsolver.solve(r)));
    CHECK(std::abs(online - direct) <= 1e-8 * direct);
  }
}

TEST_CASE("truth insertion collapses the residual and the primal-dual bound") {
  const TruthWorkspace ws(ModelSpec{1, 100, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 6);
  for (std::size_t i = 0; i < art.snapshot_parameters.size(); ++i) {
    const double mu = art.snapshot_parameters[i];
    Vector sbar = Vector::Zero(art.n_s());
    Vector lbar = Vector::Zero(art.n_q());
    // Snapshot coordinates (valid while nothing was dropped).
    REQUIRE(art.n_s() == 6);
    REQUIRE(art.n_q() == 6);
    sbar[static_cast<Index>(i)] = 1.0;
    lbar[static_cast<Index>(i)] = 1.0;
    ResidualCoefficients rc{ResidualCoefficients::Kind::primal_dual, sbar, lbar};
    const double rnorm = residual_dual_norm(art.cert, art.theta(mu), rc);
    CHECK(rnorm <= 1e-8);
    const PrimalDualBound bound = primal_dual_bound(art, mu, lbar, sbar);
    CHECK(bound.d2 == 0.0);  // disjoint supports pair to exactly zero
    CHECK(bound.delta_u <= 1e-6);
  }
}

TEST_CASE("primal-dual bound: zero multiplier degenerates to the linear bound") {
  const TruthWorkspace ws(ModelSpec{1, 60, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 3);
  const double mu = 0.004;
  const OnlineDualSolution d = solve_dual_rb(art, mu);
  const PrimalDualBound b = primal_dual_bound(art, mu, Vector::Zero(art.n_q()), d.s_coeff);
  CHECK(b.d2 == 0.0);
  CHECK(b.delta_u == doctest::Approx(2.0 * b.d1));
  CHECK(b.delta_u == doctest::Approx(b.residual_norm / mu));
}

TEST_CASE("primal-only bound: truth insertion kills the projection terms") {
  const TruthWorkspace ws(ModelSpec{1, 100, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 6);
  const double mu = art.snapshot_parameters[2];
  const KktSolution truth = solve_truth(ws, mu);
  // Exact coordinates of the truth snapshot in the orthonormal field basis.
  const Vector ubar = art.primal.phi.transpose() * (ws.model.X_V * truth.u);
  Vector lbar = Vector::Zero(art.n_q());
  lbar[2] = 1.0;
  const PrimalOnlyBound b = primal_only_bound(ws.model, art, mu, truth.u, ubar, lbar);
  CHECK(b.delta1 == 0.0);
  CHECK(b.delta2 == 0.0);
  CHECK(b.delta_u <= 1e-5);
  CHECK(b.delta_u == doctest::Approx(b.delta0 / mu));
}

TEST_CASE("bound validity and sharpness on a small sweep") {
  const TruthWorkspace ws(ModelSpec{1, 100, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 6);
  for (const double mu : draw_test_parameters(ws.model.parameter_box, 20, 11)) {
    const KktSolution truth = solve_truth(ws, mu);
    const CertifiedResult res = run_online_query(ws, art, mu, &truth);
    CHECK(res.prdu.delta_u >= res.err_u_du);
    CHECK(res.pr.delta_u >= res.err_u_pr);
    CHECK(res.prdu.delta_lambda >= res.err_lambda);
    CHECK(res.pr.delta_lambda >= res.err_lambda);
    CHECK(res.feasibility_violation_du <= 1e-12 * 11.0);
    CHECK(res.prdu.d2 >= 0.0);
  }
}

TEST_CASE("op counter brackets the reduced online path") {
  const TruthWorkspace ws(ModelSpec{2, 8, std::nullopt});
  const OfflineArtifact art = make_artifact(ws, 3);
  OpCounter::reset();
  const OnlinePrimalSolution p = solve_primal_rb(art, 0.5);
  const OnlineDualSolution d = solve_dual_rb(art, 0.5);
  primal_dual_bound(art, 0.5, p.lambda_coeff, d.s_coeff);
  const std::uint64_t prdu_ops = OpCounter::value();
  CHECK(prdu_ops > 0);
  // The primal-only bound path reconstructs at truth length and must count
  // far more work on a fine mesh.
  OpCounter::reset();
  const Vector u_pr = reconstruct_u_primal(art, p.u_coeff);
  primal_only_bound(ws.model, art, 0.5, u_pr, p.u_coeff, p.lambda_coeff);
  CHECK(OpCounter::value() > static_cast<std::uint64_t>(ws.model.dim_v()));
}
