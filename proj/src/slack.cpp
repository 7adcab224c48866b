// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/slack.hpp"

#include <cmath>
#include <sstream>

#include "vicert/errors.hpp"

namespace vicert {

BFactor::BFactor(const SparseMatrix& B) : B_(B) {
  if (B.rows() != B.cols()) throw ValidationError("B must be square");
  diagonal_ = true;
  for (Index c = 0; c < B.outerSize() && diagonal_; ++c) {
    for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) diagonal_ = false;
    }
  }
  if (diagonal_) {
    inv_diag_ = Vector::Zero(B.rows());
    for (Index c = 0; c < B.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(B, c); it; ++it) {
        if (it.row() == it.col()) inv_diag_[it.row()] = it.value();
      }
    }
    for (Index i = 0; i < inv_diag_.size(); ++i) {
      if (inv_diag_[i] == 0.0) throw SolverError("B is singular (zero diagonal entry)");
      inv_diag_[i] = 1.0 / inv_diag_[i];
    }
    return;
  }
  lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
  lu_->compute(B_);
  if (lu_->info() != Eigen::Success) throw SolverError("B is singular");
  lu_transpose_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
  SparseMatrix Bt = B_.transpose();
  lu_transpose_->compute(Bt);
  if (lu_transpose_->info() != Eigen::Success) throw SolverError("B^T is singular");
}

Vector BFactor::solve(const Vector& rhs) const {
  if (diagonal_) return inv_diag_.cwiseProduct(rhs);
  return lu_->solve(rhs);
}

Vector BFactor::solve_transpose(const Vector& rhs) const {
  if (diagonal_) return inv_diag_.cwiseProduct(rhs);
  return lu_transpose_->solve(rhs);
}

Matrix BFactor::solve_columns(const Matrix& rhs) const {
  Matrix out(rhs.rows(), rhs.cols());
  for (Index c = 0; c < rhs.cols(); ++c) out.col(c) = solve(rhs.col(c));
  return out;
}

BFactor factorize_B(const AffineTruthModel& model) { return BFactor(model.B); }

Vector DualAffineModel::theta_tilde(const ThetaValues& theta) const {
  Vector coeff(Qf_tilde());
  for (int q = 0; q < Qf; ++q) coeff[q] = theta.f[q];
  for (int qa = 0; qa < Qa; ++qa) {
    for (int qg = 0; qg < Qg; ++qg) {
      coeff[Qf + qa * Qg + qg] = theta.a[qa] * theta.g[qg];
    }
  }
  return coeff;
}

Vector DualAffineModel::ftilde_at(const ThetaValues& theta) const {
  const Vector coeff = theta_tilde(theta);
  Vector f = coeff[0] * ftilde_components[0];
  for (int q = 1; q < Qf_tilde(); ++q) f += coeff[q] * ftilde_components[q];
  return f;
}

DualAffineModel assemble_dual_affine(const AffineTruthModel& model, const BFactor& bf) {
  DualAffineModel dual;
  dual.Qa = static_cast<int>(model.A_components.size());
  dual.Qf = static_cast<int>(model.f_components.size());
  dual.Qg = static_cast<int>(model.g_components.size());
  dual.sparse_path = bf.is_diagonal();

  if (dual.sparse_path) {
    // B = diag(d): A~^q = D^{-1} A^q D^{-1} stays sparse.
    const Vector dinv = bf.solve(Vector::Ones(model.dim_q()));
    for (const auto& Aq : model.A_components) {
      SparseMatrix At = dinv.asDiagonal() * Aq * dinv.asDiagonal();
      At.makeCompressed();
      dual.Atilde_sparse.push_back(std::move(At));
    }
  } else {
    const Index n = model.dim_v();
    const Matrix Binv = bf.solve_columns(Matrix::Identity(n, n));
    for (const auto& Aq : model.A_components) {
      Matrix At = Binv.transpose() * (Aq * Binv);
      dual.Atilde_dense.push_back(std::move(At));
    }
  }

  for (int q = 0; q < dual.Qf; ++q) {
    dual.ftilde_components.push_back(-bf.solve_transpose(model.f_components[q]));
  }
  for (int qa = 0; qa < dual.Qa; ++qa) {
    for (int qg = 0; qg < dual.Qg; ++qg) {
      const Vector y = bf.solve(model.g_components[qg]);
      dual.ftilde_components.push_back(bf.solve_transpose(model.A_components[qa] * y));
    }
  }
  return dual;
}

Vector slack_from_primal(const Vector& u, const Vector& g_mu, const SparseMatrix& B) {
  if (u.size() != B.cols() || g_mu.size() != B.rows()) {
    throw ValidationError("slack_from_primal: inconsistent dimensions");
  }
  return g_mu - B * u;
}

Vector primal_from_slack(const Vector& s, const Vector& g_mu, const BFactor& bf,
                         double tolerance) {
  if (s.size() != g_mu.size() || s.size() != bf.matrix().rows()) {
    throw ValidationError("primal_from_slack: inconsistent dimensions");
  }
  const double tol =
      tolerance >= 0.0 ? tolerance : 1e-12 * (1.0 + g_mu.lpNorm<Eigen::Infinity>());
  if (s.size() && s.minCoeff() < -tol) {
    std::ostringstream msg;
    msg << "infeasible slack: min entry " << s.minCoeff() << " below -" << tol;
    throw ValidationError(msg.str());
  }
  return bf.solve(g_mu - s);
}

Vector solve_truth_dual(const AffineTruthModel& model, const DualAffineModel& dual, double mu,
                        const LcpOptions& opts) {
  const ThetaValues theta = evaluate_theta(model, mu);
  const Vector q = -dual.ftilde_at(theta);
  if (dual.sparse_path) {
    SparseMatrix M = theta.a[0] * dual.Atilde_sparse[0];
    for (int qa = 1; qa < dual.Qa; ++qa) M += theta.a[qa] * dual.Atilde_sparse[qa];
    return solve_lcp_active_set(SparseLcp{std::move(M), q}, opts).z;
  }
  Matrix M = theta.a[0] * dual.Atilde_dense[0];
  for (int qa = 1; qa < dual.Qa; ++qa) M += theta.a[qa] * dual.Atilde_dense[qa];
  return solve_lcp_active_set(DenseLcp{std::move(M), q}, opts).z;
}

FeasibilityReport check_feasibility(const Vector& u, const AffineTruthModel& model, double mu,
                                    double tolerance) {
  const AssembledOperators ops = assemble_at(model, mu);
  FeasibilityReport report;
  report.tolerance =
      tolerance >= 0.0 ? tolerance : 1e-12 * (1.0 + ops.g.lpNorm<Eigen::Infinity>());
  const Vector violation = model.B * u - ops.g;
  report.max_violation = violation.size() ? violation.maxCoeff(&report.worst_index)
                                          : 0.0;
  for (Index i = 0; i < violation.size(); ++i) {
    if (violation[i] > report.tolerance) report.violating.push_back(static_cast<int>(i));
  }
  report.pass = report.max_violation <= report.tolerance;
  return report;
}

}  // namespace vicert
