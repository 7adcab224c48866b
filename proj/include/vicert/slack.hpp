// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "vicert/lcp.hpp"
#include "vicert/truth_model.hpp"
#include "vicert/types.hpp"

namespace vicert {

// Factorization of the (square, invertible) constraint map B supporting
// solves with B and B^T.  Immutable after construction and shareable.
class BFactor {
 public:
  explicit BFactor(const SparseMatrix& B);

  Vector solve(const Vector& rhs) const;            // B x = rhs
  Vector solve_transpose(const Vector& rhs) const;  // B^T x = rhs
  Matrix solve_columns(const Matrix& rhs) const;

  const SparseMatrix& matrix() const { return B_; }
  bool is_diagonal() const { return diagonal_; }

 private:
  SparseMatrix B_;
  bool diagonal_ = false;
  Vector inv_diag_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu_transpose_;
};

BFactor factorize_B(const AffineTruthModel& model);

// Slack-variable form of the truth problem:
//   A~ = B^{-T} A B^{-1},  f~ = B^{-T} A B^{-1} g - B^{-T} f,
// expanded affinely with Qf~ = Qf + Qa*Qg components indexed by
//   q = Qf + (q'-1)*Qg + q''  for the (A^{q'}, g^{q''}) cross terms.
// For diagonal B the A~ components stay sparse; otherwise they are formed
// densely, which is intended for small systems only.
struct DualAffineModel {
  int Qa = 0, Qf = 0, Qg = 0;
  bool sparse_path = false;
  std::vector<SparseMatrix> Atilde_sparse;
  std::vector<Matrix> Atilde_dense;
  std::vector<Vector> ftilde_components;

  int Qf_tilde() const { return Qf + Qa * Qg; }
  // Coefficients of the ftilde components for given theta values.
  Vector theta_tilde(const ThetaValues& theta) const;
  Vector ftilde_at(const ThetaValues& theta) const;
};

DualAffineModel assemble_dual_affine(const AffineTruthModel& model, const BFactor& bf);

// s = g - B u; nonnegative whenever u solves the truth KKT system.
Vector slack_from_primal(const Vector& u, const Vector& g_mu, const SparseMatrix& B);

// u = B^{-1}(g - s); feasible by construction for any nonnegative s.
// Pass tolerance < 0 to use the default 1e-12 * (1 + ||g||_inf).
Vector primal_from_slack(const Vector& s, const Vector& g_mu, const BFactor& bf,
                         double tolerance = -1.0);

// Truth-scale dual solve: 0 <= s  perp  (A~(mu) s - f~(mu)) >= 0.
Vector solve_truth_dual(const AffineTruthModel& model, const DualAffineModel& dual, double mu,
                        const LcpOptions& opts = {});

struct FeasibilityReport {
  double max_violation = 0.0;  // max_i (B u - g)_i
  int worst_index = -1;
  std::vector<int> violating;
  double tolerance = 0.0;
  bool pass = true;
};

// Pass tolerance < 0 to use the default 1e-12 * (1 + ||g||_inf).
FeasibilityReport check_feasibility(const Vector& u, const AffineTruthModel& model, double mu,
                                    double tolerance = -1.0);

}  // namespace vicert
