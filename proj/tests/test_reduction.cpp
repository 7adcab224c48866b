// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "vicert/reduction.hpp"

using namespace vicert;

namespace {

struct Workspace {
  AffineTruthModel model;
  BFactor bf;
  DualAffineModel dual;
  explicit Workspace(const ModelSpec& spec)
      : model(assemble_model(spec)), bf(factorize_B(model)), dual(assemble_dual_affine(model, bf)) {}
};

}  // namespace

TEST_CASE("equidistant parameter placement") {
  const auto p = equidistant_parameters({0.001, 0.01}, 25);
  REQUIRE(p.size() == 25);
  CHECK(p.front() == doctest::Approx(0.001));
  CHECK(p.back() == doctest::Approx(0.01));
  CHECK(equidistant_parameters({0.0, 2.0}, 1) == std::vector<double>{1.0});
  CHECK_THROWS_AS(equidistant_parameters({0.0, 1.0}, 0), ValidationError);
}

TEST_CASE("snapshot generation closes the KKT system per parameter") {
  const Workspace ws({1, 50, std::nullopt});
  const SnapshotSet snaps =
      generate_snapshots(ws.model, equidistant_parameters(ws.model.parameter_box, 5));
  REQUIRE(snaps.size() == 5);
  for (int i = 0; i < snaps.size(); ++i) {
    CHECK(snaps.kkt_residuals[i] <= 1e-10);
    CHECK(snaps.lambda[i].minCoeff() >= 0.0);
    CHECK(snaps.slack[i].minCoeff() >= 0.0);
    const AssembledOperators at = assemble_at(ws.model, snaps.parameters[i]);
    const Vector s_direct = at.g - ws.model.B * snaps.u[i];
    CHECK((snaps.slack[i] - s_direct).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
  // Out-of-box parameters are rejected up front.
  CHECK_THROWS_AS(generate_snapshots(ws.model, {0.5}), OutOfDomainError);
}

TEST_CASE("primal space: orthonormality, cone columns, supremizer") {
  const Workspace ws({1, 80, std::nullopt});
  const SnapshotSet snaps =
      generate_snapshots(ws.model, equidistant_parameters(ws.model.parameter_box, 8));
  const PrimalRBSpace space = build_primal_space(snaps, ws.model);

  CHECK(space.supremizer_count == 1);
  CHECK(space.n_v() <= 9);
  CHECK(space.n_q() <= 8);
  const Matrix gram = space.phi.transpose() * (ws.model.X_V * space.phi);
  CHECK((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-10);
  for (Index c = 0; c < space.psi.cols(); ++c) CHECK(space.psi.col(c).minCoeff() >= 0.0);
  // The supremizer column is marked with source -1.
  CHECK(std::count(space.phi_source.begin(), space.phi_source.end(), -1) == 1);
}

TEST_CASE("duplicate snapshots are dropped by the filters") {
  const Workspace ws({1, 40, std::nullopt});
  const SnapshotSet snaps = generate_snapshots(ws.model, {0.004, 0.004, 0.008});
  const PrimalRBSpace space = build_primal_space(snaps, ws.model);
  CHECK(space.n_v() == 3);  // two distinct fields + supremizer
  CHECK(space.n_q() == 2);
  const DualRBSpace dual = build_dual_space(snaps);
  CHECK(dual.n_s() == 2);
  CHECK(dual.source == std::vector<int>{0, 2});
}

TEST_CASE("full schedule: basis dimensions stay within snapshot counts") {
  const Workspace ws({1, 120, std::nullopt});
  const SnapshotSet snaps =
      generate_snapshots(ws.model, equidistant_parameters(ws.model.parameter_box, 25));
  const PrimalRBSpace primal = build_primal_space(snaps, ws.model);
  const DualRBSpace dual = build_dual_space(snaps);
  CHECK(primal.n_v() <= 26);  // 25 snapshots + one supremizer
  CHECK(primal.n_q() <= 25);
  CHECK(dual.n_s() <= 25);
}

TEST_CASE("membrane solution shows the contact plateau at the obstacle height") {
  const Workspace ws({2, 16, std::nullopt});
  const SnapshotSet snaps = generate_snapshots(ws.model, {0.5});
  int touching = 0;
  for (Index i = 0; i < snaps.slack[0].size(); ++i) {
    if (snaps.slack[0][i] == 0.0) ++touching;
  }
  CHECK(touching > 0);  // contact region is nonempty
  CHECK(snaps.u[0].maxCoeff() == doctest::Approx(0.1));
  CHECK(snaps.u[0].maxCoeff() <= 0.1 + 1e-12);
}

TEST_CASE("zero multipliers lead to an empty cone basis") {
  Workspace ws({2, 6, std::nullopt});
  ws.model.g_components[0].setConstant(10.0);
  const SnapshotSet snaps = generate_snapshots(ws.model, {0.5});
  const PrimalRBSpace space = build_primal_space(snaps, ws.model);
  CHECK(space.n_q() == 0);
  CHECK(space.n_v() >= 1);
}

TEST_CASE("genuinely negative slack snapshots are rejected") {
  const Workspace ws({1, 20, std::nullopt});
  SnapshotSet snaps = generate_snapshots(ws.model, {0.005});
  snaps.slack[0][3] = -1.0;
  CHECK_THROWS_AS(build_dual_space(snaps), SolverError);
}

TEST_CASE("generic supremizer option enriches per multiplier column") {
  const Workspace ws({1, 40, std::nullopt});
  const SnapshotSet snaps =
      generate_snapshots(ws.model, equidistant_parameters(ws.model.parameter_box, 3));
  SpaceOptions opts;
  opts.generic_supremizers = true;
  const PrimalRBSpace space = build_primal_space(snaps, ws.model, opts);
  CHECK(space.supremizer_count == space.n_q());
}

TEST_CASE("reduced operators match direct projections") {
  const Workspace ws({2, 6, std::nullopt});
  const SnapshotSet snaps =
      generate_snapshots(ws.model, equidistant_parameters(ws.model.parameter_box, 4));
  const PrimalRBSpace primal = build_primal_space(snaps, ws.model);
  const DualRBSpace dual_space = build_dual_space(snaps);
  const ReducedOperators ops = reduce_operators(ws.model, ws.dual, ws.bf, primal, dual_space);

  REQUIRE(ops.A_n.size() == 1);
  CHECK(ops.A_n[0].rows() == primal.n_v());
  CHECK(ops.B_n.rows() == primal.n_q());
  CHECK(ops.Atilde_n[0].rows() == dual_space.n_s());
  CHECK(static_cast<Index>(ops.ftilde_n.size()) == 2);
  CHECK(ops.pairing.rows() == primal.n_q());
  CHECK(ops.pairing.cols() == dual_space.n_s());

  std::mt19937_64 rng(3);
  for (int probe = 0; probe < 5; ++probe) {
    const Index i = static_cast<Index>(rng() % primal.n_v());
    const Index j = static_cast<Index>(rng() % primal.n_v());
    const double direct = primal.phi.col(i).dot(ws.model.A_components[0] * primal.phi.col(j));
    CHECK(std::abs(ops.A_n[0](i, j) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
    const Index k = static_cast<Index>(rng() % primal.n_q());
    const Index l = static_cast<Index>(rng() % dual_space.n_s());
    const double pair = primal.psi.col(k).dot(dual_space.zeta.col(l));
    CHECK(std::abs(ops.pairing(k, l) - pair) <= 1e-12 * (1.0 + std::abs(pair)));
  }

  // B = I and a shared single column: B_n = psi^T phi and P = psi^T psi.
  const double b_direct = primal.psi.col(0).dot(primal.phi.col(0));
  CHECK(std::abs(ops.B_n(0, 0) - b_direct) <= 1e-14 * (1.0 + std::abs(b_direct)));
}

TEST_CASE("1x1 reduced A equals the scalar projection") {
  const Workspace ws({1, 20, std::nullopt});
  const SnapshotSet snaps = generate_snapshots(ws.model, {0.005});
  const PrimalRBSpace primal = build_primal_space(snaps, ws.model);
  const DualRBSpace dual_space = build_dual_space(snaps);
  const ReducedOperators ops = reduce_operators(ws.model, ws.dual, ws.bf, primal, dual_space);
  const double direct = primal.phi.col(0).dot(ws.model.A_components[0] * primal.phi.col(0));
  CHECK(ops.A_n[0](0, 0) == doctest::Approx(direct));
}

TEST_CASE("inf-sup constant: identity cases and the dense eigensolve oracle") {
  // Synthetic identity model: beta = 1 for B = I and B = -I.
  for (const double sign : {1.0, -1.0}) {
    AffineTruthModel toy;
    toy.spec = {1, 2, std::nullopt};
    SparseMatrix I(6, 6);
    I.setIdentity();
    toy.A_components = {I};
    toy.X_V = I;
    toy.B = sign * I;
    toy.f_components = {Vector::Ones(6)};
    toy.g_components = {Vector::Ones(6)};
    toy.parameter_box = {0.0, 1.0};
    const BFactor bf(toy.B);
    CHECK(compute_beta(toy, bf) == doctest::Approx(1.0));
  }

  const Workspace ws({1, 199, std::nullopt});
  const double beta = compute_beta(ws.model, ws.bf);
  const Matrix X = Matrix(ws.model.X_V);
  const Matrix BXBt = Matrix(ws.model.B) * X.inverse() * Matrix(ws.model.B).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (BXBt + BXBt.transpose()));
  const double oracle = std::sqrt(eig.eigenvalues().minCoeff());
  CHECK(beta > 0.0);
  CHECK(std::abs(beta - oracle) <= 1e-10 * oracle);
}

TEST_CASE("stability bounds: exact for the built-in models, vertex fallback otherwise") {
  const AffineTruthModel m1 = assemble_model({1, 10, std::nullopt});
  CHECK(stability_bounds(m1, 0.001).alpha_lb == doctest::Approx(0.001));
  CHECK(stability_bounds(m1, 0.001).gamma_ub == doctest::Approx(0.001));
  CHECK(stability_bounds(m1, 0.001).certified);
  const AffineTruthModel m2 = assemble_model({2, 4, std::nullopt});
  CHECK(stability_bounds(m2, 0.55).alpha_lb == doctest::Approx(0.55));
  CHECK_THROWS_AS(stability_bounds(m1, 0.5), OutOfDomainError);

  // Non-exact synthetic model: X != A, fallback engages and is not certified.
  AffineTruthModel toy = assemble_model({1, 10, std::nullopt});
  SparseMatrix I(toy.dim_v(), toy.dim_v());
  I.setIdentity();
  toy.X_V = I;
  toy.exact_stability = false;
  const StabilityBounds sb = stability_bounds(toy, 0.005);
  CHECK_FALSE(sb.certified);
  CHECK(sb.alpha_lb > 0.0);
  CHECK(sb.gamma_ub >= sb.alpha_lb);
}

TEST_CASE("offline artifact: lossless round trip and error paths") {
  const Workspace ws({1, 30, std::nullopt});
  const OfflineArtifact art =
      build_offline(ws.model, equidistant_parameters(ws.model.parameter_box, 4));

  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "vicert_test_artifact.rb";
  save_offline(art, path);
  const OfflineArtifact loaded = load_offline(path);

  CHECK(loaded.spec.model == art.spec.model);
  CHECK(loaded.snapshot_parameters == art.snapshot_parameters);
  CHECK((loaded.primal.phi - art.primal.phi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.ops.B_n - art.ops.B_n).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.ops.Atilde_n[0] - art.ops.Atilde_n[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.cert.primal_dual.hi - art.cert.primal_dual.hi).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.cert.primal_dual.lo - art.cert.primal_dual.lo).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.cert.beta == art.cert.beta);

  // Wrong version tag.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const std::uint32_t bad = 999;
    f.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
  }
  CHECK_THROWS_AS(load_offline(path), IoError);

  // Truncated file.
  save_offline(art, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  CHECK_THROWS_AS(load_offline(path), IoError);

  // Not an artifact at all.
  {
    std::ofstream f(path, std::ios::trunc);
    f << "not an artifact";
  }
  CHECK_THROWS_AS(load_offline(path), IoError);
  std::filesystem::remove(path);
}
