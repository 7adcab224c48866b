// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vicert/errors.hpp"
#include "vicert/types.hpp"

namespace vicert {

// Linear complementarity problem in the convention
//   find z >= 0 with w = M z + q >= 0 and z^T w = 0.
// The solvers assume M positive definite (not necessarily symmetric).
template <class MatrixType>
struct LcpProblem {
  MatrixType M;
  Vector q;
};
using DenseLcp = LcpProblem<Matrix>;
using SparseLcp = LcpProblem<SparseMatrix>;

struct LcpOptions {
  double tolerance = 1e-10;  // scaled by (1 + ||q||_inf)
  int max_iterations = 200;  // active-set sweeps
  double active_set_shift = 1.0;  // c in the update A+ = { i : z_i - c w_i > 0 }
  double relaxation = 1.0;        // omega for the projected SOR fallback
  int relaxation_iteration_factor = 50;  // relaxation sweep cap = factor * n
};

struct LcpSolution {
  Vector z, w;
  std::vector<int> active_set;  // { i : z_i > 0 }
  int iterations = 0;
  double min_z = 0.0;
  double min_w = 0.0;
  double complementarity_gap = 0.0;  // |z^T w|
};

// Iteration cap reached or the active set cycled; carries the last iterate so
// the caller may fall back to projected relaxation.
class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, LcpSolution last)
      : SolverError(what), last_iterate(std::move(last)) {}
  LcpSolution last_iterate;
};

// Primal-dual active-set iteration (semismooth Newton set update); terminates
// when two successive active sets coincide.
LcpSolution solve_lcp_active_set(const DenseLcp& lcp, const LcpOptions& opts = {});
LcpSolution solve_lcp_active_set(const SparseLcp& lcp, const LcpOptions& opts = {});

// Projected Gauss-Seidel / SOR; robust tolerance-limited fallback.
LcpSolution solve_lcp_projected_relaxation(const DenseLcp& lcp, const LcpOptions& opts = {});
LcpSolution solve_lcp_projected_relaxation(const SparseLcp& lcp, const LcpOptions& opts = {});

// Oracle: enumerate all 2^n active sets (inactive-first order), solve each
// equality system, return the first feasible candidate.  Requires n <= 20.
LcpSolution solve_lcp_bruteforce(const DenseLcp& lcp, double tolerance = 1e-9);

// Mixed KKT system
//   A u + B^T lambda = f,  g - B u >= 0,  lambda >= 0,  (g - B u)^T lambda = 0
// solved by condensing u = A^{-1}(f - B^T lambda) into the LCP with
// M = B A^{-1} B^T and q = g - B A^{-1} f.  The returned slack is the LCP
// residual w = g - B u with exact zeros on the active set.
struct KktSolution {
  Vector u, lambda, slack;
  int iterations = 0;
  double kkt_residual = 0.0;  // ||A u + B^T lambda - f||_inf
};

KktSolution solve_mixed_kkt(const Matrix& A, const Matrix& B, const Vector& f,
                            const Vector& g, const LcpOptions& opts = {});

// Truth-scale variant: the condensation is performed lazily, one bordered
// saddle solve [A, B_A^T; B_A, 0] per active set, so A^{-1} is never formed.
KktSolution solve_mixed_kkt(const SparseMatrix& A, const SparseMatrix& B, const Vector& f,
                            const Vector& g, const LcpOptions& opts = {});

}  // namespace vicert
