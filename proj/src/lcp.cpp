// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/lcp.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "vicert/op_counter.hpp"

namespace vicert {

namespace {

using Mask = std::vector<char>;

std::vector<int> mask_indices(const Mask& mask) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) idx.push_back(i);
  }
  return idx;
}

std::string mask_key(const Mask& mask) { return std::string(mask.begin(), mask.end()); }

void check_lcp_sizes(Index rows, Index cols, Index qsize) {
  if (rows != cols) throw ValidationError("LCP matrix must be square");
  if (rows != qsize) throw ValidationError("LCP q size does not match M");
}

// Solve M(idx, idx) x = rhs with one iterative-refinement pass.  The solve is
// rank-revealing: cone bases may carry numerically dependent columns, making
// principal minors singular but consistent (minimum-norm solution taken).
Vector solve_principal(const Matrix& M, const std::vector<int>& idx, const Vector& rhs) {
  const Index na = static_cast<Index>(idx.size());
  Matrix Ma = M(idx, idx);
  OpCounter::add(static_cast<std::uint64_t>(na) * na * na + na * na);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Ma);
  Vector x = cod.solve(rhs);
  Vector r = rhs - Ma * x;
  x += cod.solve(r);
  const double res = (Ma * x - rhs).lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>() +
                       Ma.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || res > 1e-6 * scale) {
    throw SolverError("principal subsystem solve failed (inconsistent singular system)");
  }
  return x;
}

SparseMatrix principal_submatrix(const SparseMatrix& M, const std::vector<int>& idx) {
  std::vector<int> local(M.rows(), -1);
  for (int k = 0; k < static_cast<int>(idx.size()); ++k) local[idx[k]] = k;
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < static_cast<int>(idx.size()); ++k) {
    const int col = idx[k];
    for (SparseMatrix::InnerIterator it(M, col); it; ++it) {
      const int lr = local[it.row()];
      if (lr >= 0) trips.emplace_back(lr, k, it.value());
    }
  }
  SparseMatrix Ma(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
  Ma.setFromTriplets(trips.begin(), trips.end());
  return Ma;
}

Vector solve_principal(const SparseMatrix& M, const std::vector<int>& idx, const Vector& rhs) {
  SparseMatrix Ma = principal_submatrix(M, idx);
  Eigen::SparseLU<SparseMatrix> lu(Ma);
  if (lu.info() != Eigen::Success) {
    throw SolverError("principal subsystem factorization failed");
  }
  Vector x = lu.solve(rhs);
  Vector r = rhs - Ma * x;
  x += lu.solve(r);
  if (!x.allFinite()) throw SolverError("principal subsystem solve produced non-finite values");
  return x;
}

LcpSolution make_solution(Vector z, Vector w, int iterations) {
  LcpSolution sol;
  sol.z = std::move(z);
  sol.w = std::move(w);
  sol.iterations = iterations;
  for (int i = 0; i < sol.z.size(); ++i) {
    if (sol.z[i] > 0.0) sol.active_set.push_back(i);
  }
  sol.min_z = sol.z.size() ? sol.z.minCoeff() : 0.0;
  sol.min_w = sol.w.size() ? sol.w.minCoeff() : 0.0;
  sol.complementarity_gap = std::abs(sol.z.dot(sol.w));
  return sol;
}

// One active-set trial step: solve the principal subsystem, rebuild (z, w)
// with exact zeros on the solved rows.
template <class MatrixType>
void active_set_step(const LcpProblem<MatrixType>& lcp, const std::vector<int>& idx, Vector& z,
                     Vector& w) {
  const Index n = lcp.q.size();
  z.setZero();
  if (!idx.empty()) {
    const Vector za = solve_principal(lcp.M, idx, Vector(-lcp.q(idx)));
    for (int k = 0; k < static_cast<int>(idx.size()); ++k) z[idx[k]] = za[k];
  }
  w = lcp.M * z + lcp.q;
  OpCounter::add(static_cast<std::uint64_t>(n) * n);
  // Rows in the active set were solved to zero; clear the roundoff so
  // complementarity holds exactly on disjoint supports.
  for (int i : idx) w[i] = 0.0;
}

// Least-index principal pivoting (one index toggled per step); terminates for
// P-matrices and therefore breaks the rare cycles of the semismooth update on
// badly conditioned reduced systems.
template <class MatrixType>
LcpSolution least_index_pivoting(const LcpProblem<MatrixType>& lcp, const LcpOptions& opts,
                                 int iterations_used) {
  const Index n = lcp.q.size();
  const double tol = opts.tolerance * (1.0 + lcp.q.template lpNorm<Eigen::Infinity>());
  Mask active(n, 0);
  Vector z(n), w(n);
  const int max_flips = 64 * static_cast<int>(n) + 4096;
  for (int flip = 0; flip <= max_flips; ++flip) {
    active_set_step(lcp, mask_indices(active), z, w);
    int violated = -1;
    for (Index i = 0; i < n && violated < 0; ++i) {
      if (active[i] ? z[i] < -tol : w[i] < -tol) violated = static_cast<int>(i);
    }
    if (violated < 0) {
      // Entries in (-tol, 0] are degenerate; classify them inactive.
      for (Index i = 0; i < n; ++i) {
        if (z[i] < 0.0) z[i] = 0.0;
      }
      return make_solution(std::move(z), std::move(w), iterations_used + flip + 1);
    }
    active[violated] = !active[violated];
  }
  throw NonConvergenceError("least-index pivoting exceeded " + std::to_string(max_flips) +
                                " flips",
                            make_solution(std::move(z), std::move(w), iterations_used));
}

// Shared primal-dual active-set loop; MatrixType is dense or sparse.
template <class MatrixType>
LcpSolution active_set_loop(const LcpProblem<MatrixType>& lcp, const LcpOptions& opts) {
  const Index n = lcp.q.size();
  check_lcp_sizes(lcp.M.rows(), lcp.M.cols(), n);
  if (n == 0) return make_solution(Vector(), Vector(), 0);

  const double tol = opts.tolerance * (1.0 + lcp.q.template lpNorm<Eigen::Infinity>());
  const double shift = opts.active_set_shift;

  // Starting from z = 0, w = q the update rule activates exactly { q_i < 0 }.
  Mask active(n, 0);
  for (Index i = 0; i < n; ++i) active[i] = lcp.q[i] < 0.0;

  std::unordered_set<std::string> visited;
  visited.insert(mask_key(active));

  Vector z = Vector::Zero(n);
  Vector w = lcp.q;

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    active_set_step(lcp, mask_indices(active), z, w);

    Mask next(n, 0);
    for (Index i = 0; i < n; ++i) next[i] = (z[i] - shift * w[i]) > 0.0;

    if (next == active) {
      LcpSolution sol = make_solution(std::move(z), std::move(w), iter);
      if (sol.min_z < -tol || sol.min_w < -tol ||
          sol.complementarity_gap > tol * (1.0 + lcp.q.norm())) {
        throw NonConvergenceError("active-set iteration stabilized outside tolerance",
                                  std::move(sol));
      }
      return sol;
    }
    const std::string key = mask_key(next);
    if (visited.count(key)) {
      // Semismooth update revisited a set: resolve deterministically.
      return least_index_pivoting(lcp, opts, iter);
    }
    visited.insert(key);
    active = std::move(next);
  }
  throw NonConvergenceError(
      "active-set iteration did not stabilize within " + std::to_string(opts.max_iterations) +
          " sweeps",
      make_solution(std::move(z), std::move(w), opts.max_iterations));
}

template <class RowMajorMatrix>
LcpSolution relaxation_loop(const RowMajorMatrix& M, const Vector& q, const LcpOptions& opts) {
  const Index n = q.size();
  if (n == 0) return make_solution(Vector(), Vector(), 0);
  Vector diag(n);
  for (Index i = 0; i < n; ++i) {
    diag[i] = M.coeff(i, i);
    if (!(diag[i] > 0.0)) throw ValidationError("projected relaxation requires positive diagonal");
  }
  const double tol = opts.tolerance * (1.0 + q.lpNorm<Eigen::Infinity>());
  const int max_sweeps = opts.relaxation_iteration_factor * static_cast<int>(n);

  Vector z = Vector::Zero(n);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double dz = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double wi = M.row(i).dot(z) + q[i];
      const double zi = std::max(0.0, z[i] - opts.relaxation * wi / diag[i]);
      dz = std::max(dz, std::abs(zi - z[i]));
      z[i] = zi;
    }
    Vector w = M * z + q;
    OpCounter::add(static_cast<std::uint64_t>(n) * n);
    const double min_w = w.minCoeff();
    const double gap = std::abs(z.dot(w));
    // The sweep increment gates convergence as well: the w-residual alone can
    // leave z short of the fixed point on ill-conditioned instances.
    if (min_w >= -tol && gap <= tol * (1.0 + q.norm()) &&
        dz <= 0.05 * tol * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      return make_solution(std::move(z), std::move(w), sweep);
    }
  }
  Vector w = M * z + q;
  throw NonConvergenceError(
      "projected relaxation did not reach tolerance within " + std::to_string(max_sweeps) +
          " sweeps",
      make_solution(std::move(z), std::move(w), max_sweeps));
}

}  // namespace

LcpSolution solve_lcp_active_set(const DenseLcp& lcp, const LcpOptions& opts) {
  return active_set_loop(lcp, opts);
}

LcpSolution solve_lcp_active_set(const SparseLcp& lcp, const LcpOptions& opts) {
  return active_set_loop(lcp, opts);
}

LcpSolution solve_lcp_projected_relaxation(const DenseLcp& lcp, const LcpOptions& opts) {
  check_lcp_sizes(lcp.M.rows(), lcp.M.cols(), lcp.q.size());
  return relaxation_loop(lcp.M, lcp.q, opts);
}

LcpSolution solve_lcp_projected_relaxation(const SparseLcp& lcp, const LcpOptions& opts) {
  check_lcp_sizes(lcp.M.rows(), lcp.M.cols(), lcp.q.size());
  const Eigen::SparseMatrix<double, Eigen::RowMajor> Mr(lcp.M);
  return relaxation_loop(Mr, lcp.q, opts);
}

LcpSolution solve_lcp_bruteforce(const DenseLcp& lcp, double tolerance) {
  const Index n = lcp.q.size();
  check_lcp_sizes(lcp.M.rows(), lcp.M.cols(), n);
  if (n > 20) throw ValidationError("brute-force enumeration limited to n <= 20");
  if (n == 0) return make_solution(Vector(), Vector(), 0);

  const double tol = tolerance * (1.0 + lcp.q.lpNorm<Eigen::Infinity>());
  std::vector<std::uint32_t> masks(1u << n);
  std::iota(masks.begin(), masks.end(), 0u);
  // Inactive-first ordering: degenerate ties resolve toward the inactive set.
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) < std::popcount(b);
  });

  int tested = 0;
  for (std::uint32_t mask : masks) {
    ++tested;
    std::vector<int> idx;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(static_cast<int>(i));
    }
    Vector z = Vector::Zero(n);
    if (!idx.empty()) {
      Matrix Ma = lcp.M(idx, idx);
      Eigen::PartialPivLU<Matrix> lu(Ma);
      Vector za = lu.solve(Vector(-lcp.q(idx)));
      za += lu.solve(Vector(-lcp.q(idx) - Ma * za));
      if (!za.allFinite()) continue;
      bool nonneg = true;
      for (const double v : za) nonneg = nonneg && v >= -tol;
      if (!nonneg) continue;
      for (int k = 0; k < static_cast<int>(idx.size()); ++k) z[idx[k]] = za[k];
    }
    Vector w = lcp.M * z + lcp.q;
    for (int i : idx) w[i] = 0.0;
    if (w.minCoeff() >= -tol) return make_solution(std::move(z), std::move(w), tested);
  }
  throw SolverError("no feasible active set found (input likely not positive definite)");
}

KktSolution solve_mixed_kkt(const Matrix& A, const Matrix& B, const Vector& f, const Vector& g,
                            const LcpOptions& opts) {
  const Index n = A.rows();
  const Index nq = B.rows();
  if (A.cols() != n || B.cols() != n || f.size() != n || g.size() != nq) {
    throw ValidationError("mixed KKT system has inconsistent dimensions");
  }
  Eigen::PartialPivLU<Matrix> alu(A);
  OpCounter::add(static_cast<std::uint64_t>(n) * n * n / 3);
  Vector uf = alu.solve(f);
  uf += alu.solve(f - A * uf);
  const double fres = (A * uf - f).lpNorm<Eigen::Infinity>();
  if (!uf.allFinite() || fres > 1e-8 * (1.0 + f.lpNorm<Eigen::Infinity>() +
                                        A.lpNorm<Eigen::Infinity>() * uf.lpNorm<Eigen::Infinity>())) {
    throw SolverError("singular system matrix in mixed KKT condensation");
  }

  KktSolution out;
  if (nq == 0) {
    out.u = uf;
    out.lambda = Vector();
    out.slack = Vector();
    out.kkt_residual = fres;
    return out;
  }

  Matrix AinvBt = alu.solve(Matrix(B.transpose()));
  AinvBt += alu.solve(Matrix(B.transpose() - A * AinvBt));
  DenseLcp lcp{B * AinvBt, g - B * uf};
  OpCounter::add(static_cast<std::uint64_t>(n) * n * nq + static_cast<std::uint64_t>(nq) * nq * n);

  LcpSolution sol = solve_lcp_active_set(lcp, opts);
  out.u = uf - AinvBt * sol.z;
  OpCounter::add(static_cast<std::uint64_t>(n) * nq);
  out.lambda = sol.z;
  out.slack = sol.w;
  out.iterations = sol.iterations;
  out.kkt_residual = (A * out.u + B.transpose() * out.lambda - f).lpNorm<Eigen::Infinity>();
  return out;
}

KktSolution solve_mixed_kkt(const SparseMatrix& A, const SparseMatrix& B, const Vector& f,
                            const Vector& g, const LcpOptions& opts) {
  const Index n = A.rows();
  const Index nq = B.rows();
  if (A.cols() != n || B.cols() != n || f.size() != n || g.size() != nq) {
    throw ValidationError("mixed KKT system has inconsistent dimensions");
  }

  Eigen::SparseLU<SparseMatrix> alu(A);
  if (alu.info() != Eigen::Success) throw SolverError("singular system matrix in mixed KKT");
  Vector uf = alu.solve(f);
  uf += alu.solve(f - A * uf);
  if (!uf.allFinite()) throw SolverError("mixed KKT base solve produced non-finite values");

  const Eigen::SparseMatrix<double, Eigen::RowMajor> Brows(B);
  const SparseMatrix Bt = B.transpose();

  Vector s0 = g - B * uf;
  const double tol = opts.tolerance * (1.0 + s0.lpNorm<Eigen::Infinity>());
  const double shift = opts.active_set_shift;

  Vector u = uf, lambda = Vector::Zero(nq), s = s0;

  // One bordered saddle solve: enforce (B u)_A = g_A with multipliers on A.
  auto saddle_step = [&](const std::vector<int>& idx) {
    const Index na = static_cast<Index>(idx.size());
    if (na == 0) {
      u = uf;
      lambda.setZero();
    } else {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(A.nonZeros() + 2 * Brows.nonZeros());
      for (Index c = 0; c < n; ++c) {
        for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
          trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(c), it.value());
        }
      }
      for (Index k = 0; k < na; ++k) {
        const int row = idx[static_cast<int>(k)];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Brows, row); it;
             ++it) {
          trips.emplace_back(static_cast<int>(n + k), static_cast<int>(it.col()), it.value());
          trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(n + k), it.value());
        }
      }
      SparseMatrix K(n + na, n + na);
      K.setFromTriplets(trips.begin(), trips.end());
      Eigen::SparseLU<SparseMatrix> klu(K);
      if (klu.info() != Eigen::Success) {
        throw SolverError("bordered KKT factorization failed (rank-deficient constraints?)");
      }
      Vector rhs(n + na);
      rhs.head(n) = f;
      for (Index k = 0; k < na; ++k) rhs[n + k] = g[idx[static_cast<int>(k)]];
      Vector sol = klu.solve(rhs);
      sol += klu.solve(rhs - K * sol);
      if (!sol.allFinite()) throw SolverError("bordered KKT solve produced non-finite values");
      u = sol.head(n);
      lambda.setZero();
      for (Index k = 0; k < na; ++k) lambda[idx[static_cast<int>(k)]] = sol[n + k];
    }
    s = g - B * u;
    for (int i : idx) s[i] = 0.0;  // active constraints hold by construction
  };

  auto pack_iterate = [&](int iter) {
    Vector w = s;
    return make_solution(lambda, std::move(w), iter);
  };
  auto pack_result = [&](int iterations) {
    KktSolution out;
    out.u = std::move(u);
    out.lambda = std::move(lambda);
    out.slack = std::move(s);
    out.iterations = iterations;
    out.kkt_residual = (A * out.u + Bt * out.lambda - f).lpNorm<Eigen::Infinity>();
    return out;
  };

  Mask active(nq, 0);
  for (Index i = 0; i < nq; ++i) active[i] = s0[i] < 0.0;
  std::unordered_set<std::string> visited;
  visited.insert(mask_key(active));

  bool cycled = false;
  int sweeps = 0;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    sweeps = iter;
    saddle_step(mask_indices(active));

    Mask next(nq, 0);
    for (Index i = 0; i < nq; ++i) next[i] = (lambda[i] - shift * s[i]) > 0.0;

    if (next == active) {
      if (s.size() && s.minCoeff() < -tol) {
        throw NonConvergenceError("mixed KKT active set stabilized outside tolerance",
                                  pack_iterate(iter));
      }
      return pack_result(iter);
    }
    const std::string key = mask_key(next);
    if (visited.count(key)) {
      cycled = true;  // resolve deterministically below
      break;
    }
    visited.insert(key);
    active = std::move(next);
  }
  if (!cycled) {
    throw NonConvergenceError("mixed KKT active set did not stabilize within " +
                                  std::to_string(opts.max_iterations) + " sweeps",
                              pack_iterate(opts.max_iterations));
  }

  // Least-index pivoting on the condensed complementarity pair (lambda, s);
  // finite for the positive-definite condensed system.
  active.assign(nq, 0);
  const int max_flips = 64 * static_cast<int>(nq) + 4096;
  for (int flip = 0; flip <= max_flips; ++flip) {
    saddle_step(mask_indices(active));
    int violated = -1;
    for (Index i = 0; i < nq && violated < 0; ++i) {
      if (active[i] ? lambda[i] < -tol : s[i] < -tol) violated = static_cast<int>(i);
    }
    if (violated < 0) {
      for (Index i = 0; i < nq; ++i) {
        if (lambda[i] < 0.0) lambda[i] = 0.0;  // degenerate entries become inactive
      }
      return pack_result(sweeps + flip + 1);
    }
    active[violated] = !active[violated];
  }
  throw NonConvergenceError("mixed KKT least-index pivoting exceeded " +
                                std::to_string(max_flips) + " flips",
                            pack_iterate(sweeps + max_flips));
}

}  // namespace vicert
