// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "vicert/lcp.hpp"
#include "vicert/truth_model.hpp"

using namespace vicert;

namespace {

Matrix random_spd(std::mt19937_64& rng, Index n) {
  Matrix R(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      R(i, j) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    }
  }
  return R.transpose() * R + Matrix::Identity(n, n);
}

Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = scale * (2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0);
  return v;
}

}  // namespace

TEST_CASE("active set: decoupled clip") {
  DenseLcp lcp{Matrix::Identity(2, 2), (Vector(2) << -1.0, 1.0).finished()};
  const LcpSolution sol = solve_lcp_active_set(lcp);
  CHECK(sol.z[0] == doctest::Approx(1.0));
  CHECK(sol.z[1] == doctest::Approx(0.0));
  CHECK(sol.w[0] == doctest::Approx(0.0));
  CHECK(sol.w[1] == doctest::Approx(1.0));
  CHECK(sol.active_set == std::vector<int>{0});
}

TEST_CASE("active set: feasible start terminates immediately") {
  DenseLcp lcp{Matrix::Identity(2, 2), Vector::Ones(2)};
  const LcpSolution sol = solve_lcp_active_set(lcp);
  CHECK(sol.z.isZero(0.0));
  CHECK((sol.w - lcp.q).isZero(0.0));
  CHECK(sol.iterations == 1);
}

TEST_CASE("active set: interior solution") {
  DenseLcp lcp{(Matrix(2, 2) << 2.0, 1.0, 1.0, 2.0).finished(),
               (Vector(2) << -3.0, -3.0).finished()};
  const LcpSolution sol = solve_lcp_active_set(lcp);
  CHECK(sol.z[0] == doctest::Approx(1.0));
  CHECK(sol.z[1] == doctest::Approx(1.0));
  CHECK(sol.w.lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("projected relaxation: spec examples") {
  {
    DenseLcp lcp{Matrix::Identity(2, 2), (Vector(2) << -1.0, 1.0).finished()};
    CHECK(solve_lcp_projected_relaxation(lcp).z[0] == doctest::Approx(1.0));
  }
  {
    DenseLcp lcp{(Matrix(2, 2) << 2.0, 1.0, 1.0, 2.0).finished(),
                 (Vector(2) << -3.0, -3.0).finished()};
    const LcpSolution sol = solve_lcp_projected_relaxation(lcp);
    CHECK(std::abs(sol.z[0] - 1.0) <= 1e-10);
    CHECK(std::abs(sol.z[1] - 1.0) <= 1e-10);
  }
  {
    DenseLcp lcp{Matrix::Constant(1, 1, 2.0), Vector::Constant(1, -4.0)};
    CHECK(solve_lcp_projected_relaxation(lcp).z[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("brute force: spec examples and degenerate tie-breaking") {
  {
    DenseLcp lcp{Matrix::Identity(2, 2), (Vector(2) << -1.0, 1.0).finished()};
    const LcpSolution sol = solve_lcp_bruteforce(lcp);
    CHECK(sol.z[0] == doctest::Approx(1.0));
    CHECK(sol.z[1] == doctest::Approx(0.0));
  }
  {
    // z = w = 0: the tie resolves toward the inactive set.
    DenseLcp lcp{Matrix::Identity(2, 2), Vector::Zero(2)};
    const LcpSolution sol = solve_lcp_bruteforce(lcp);
    CHECK(sol.z.isZero(0.0));
    CHECK(sol.active_set.empty());
  }
  CHECK_THROWS_AS(solve_lcp_bruteforce(DenseLcp{Matrix::Identity(21, 21), Vector::Zero(21)}),
                  ValidationError);
}

TEST_CASE("oracle equivalence on random SPD instances") {
  std::mt19937_64 rng(12345);
  LcpOptions relax_opts;
  relax_opts.relaxation_iteration_factor = 400;
  for (int inst = 0; inst < 120; ++inst) {
    const Index n = 1 + static_cast<Index>(rng() % 10);
    DenseLcp lcp{random_spd(rng, n), random_vector(rng, n, 4.0)};
    const LcpSolution ref = solve_lcp_bruteforce(lcp);
    const LcpSolution as = solve_lcp_active_set(lcp);
    const LcpSolution pgs = solve_lcp_projected_relaxation(lcp, relax_opts);
    CHECK((as.z - ref.z).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((pgs.z - ref.z).lpNorm<Eigen::Infinity>() <= 1e-8);
    // Complementarity is exact on the active-set path.
    for (Index i = 0; i < n; ++i) CHECK(as.z[i] * as.w[i] == 0.0);
    // Reported residuals are consistent with the returned vectors.
    CHECK(as.min_z == as.z.minCoeff());
    CHECK(as.min_w == as.w.minCoeff());
  }
}

TEST_CASE("sparse and dense active-set solvers agree") {
  std::mt19937_64 rng(77);
  for (int inst = 0; inst < 10; ++inst) {
    const Index n = 12;
    const Matrix M = random_spd(rng, n);
    const Vector q = random_vector(rng, n, 3.0);
    const LcpSolution dense = solve_lcp_active_set(DenseLcp{M, q});
    const LcpSolution sparse = solve_lcp_active_set(SparseLcp{M.sparseView(), q});
    CHECK((dense.z - sparse.z).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("non-convergence carries the last iterate") {
  // This instance needs two active-set corrections from the cold start.
  DenseLcp lcp{(Matrix(2, 2) << 1.0, -0.9, -0.9, 1.0).finished(),
               (Vector(2) << -1.0, 0.5).finished()};
  LcpOptions opts;
  opts.max_iterations = 1;
  try {
    solve_lcp_active_set(lcp, opts);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.last_iterate.z.size() == 2);
    CHECK(e.last_iterate.iterations == 1);
  }
  // With enough iterations the same instance solves fine.
  const LcpSolution sol = solve_lcp_active_set(lcp);
  CHECK(sol.min_w >= -1e-12);
}

TEST_CASE("mixed KKT: coarse rope model has an inactive obstacle") {
  const Matrix A = Matrix::Constant(1, 1, 4.0);
  const Matrix B = Matrix::Constant(1, 1, -1.0);
  const KktSolution sol =
      solve_mixed_kkt(A, B, Vector::Constant(1, -0.5), Vector::Constant(1, 7.5));
  CHECK(sol.u[0] == doctest::Approx(-0.125));
  CHECK(sol.lambda[0] == 0.0);
}

TEST_CASE("mixed KKT: decoupled clip at the bound") {
  const KktSolution sol =
      solve_mixed_kkt(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Ones(2),
                      (Vector(2) << 0.25, 2.0).finished());
  CHECK(sol.u[0] == doctest::Approx(0.25));
  CHECK(sol.u[1] == doctest::Approx(1.0));
  CHECK(sol.lambda[0] == doctest::Approx(0.75));
  CHECK(sol.lambda[1] == 0.0);
}

TEST_CASE("mixed KKT: inactive constraints reduce to the linear solve") {
  std::mt19937_64 rng(9);
  const Matrix A = random_spd(rng, 5);
  Matrix B(3, 5);
  for (Index i = 0; i < 3; ++i) B.row(i) = random_vector(rng, 5).transpose();
  const Vector f = random_vector(rng, 5);
  const Vector uf = A.ldlt().solve(f);
  const Vector g = B * uf + Vector::Ones(3);  // strictly feasible
  const KktSolution sol = solve_mixed_kkt(A, B, f, g);
  CHECK(sol.lambda.isZero(0.0));
  CHECK((sol.u - uf).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("mixed KKT: dense and sparse routes agree on the truth model") {
  const AffineTruthModel model = assemble_model({1, 40, std::nullopt});
  const AssembledOperators at = assemble_at(model, 0.004);
  const KktSolution sparse = solve_mixed_kkt(at.A, model.B, at.f, at.g);
  const KktSolution dense = solve_mixed_kkt(Matrix(at.A), Matrix(model.B), at.f, at.g);
  CHECK((sparse.u - dense.u).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((sparse.lambda - dense.lambda).lpNorm<Eigen::Infinity>() <= 1e-9);
  // The slack report has exact zeros on the active set.
  for (Index i = 0; i < sparse.lambda.size(); ++i) {
    CHECK(sparse.lambda[i] * sparse.slack[i] == 0.0);
  }
  CHECK(sparse.kkt_residual <= 1e-10);
}

TEST_CASE("mixed KKT: all four conditions close on the 2d model") {
  const AffineTruthModel model = assemble_model({2, 8, std::nullopt});
  const AssembledOperators at = assemble_at(model, 0.5);
  const KktSolution sol = solve_mixed_kkt(at.A, model.B, at.f, at.g);
  CHECK(sol.kkt_residual <= 1e-12);
  CHECK(sol.lambda.minCoeff() >= 0.0);
  const Vector slack = at.g - model.B * sol.u;
  CHECK(slack.minCoeff() >= -1e-12);
  CHECK(std::abs(slack.dot(sol.lambda)) <= 1e-12);
  // Contact is active somewhere for this parameter.
  CHECK(sol.lambda.maxCoeff() > 0.0);
}

TEST_CASE("singular inputs are rejected") {
  CHECK_THROWS_AS(solve_mixed_kkt(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Ones(2),
                                  Vector::Ones(2)),
                  SolverError);
}
