// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "vicert/errors.hpp"
#include "vicert/parallel.hpp"

namespace vicert {

std::vector<double> equidistant_parameters(const std::array<double, 2>& box, int n) {
  if (n < 1) throw ValidationError("snapshot count must be at least 1");
  std::vector<double> params;
  params.reserve(n);
  if (n == 1) {
    params.push_back(0.5 * (box[0] + box[1]));
    return params;
  }
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    params.push_back(box[0] * (1.0 - t) + box[1] * t);  // exact at both endpoints
  }
  return params;
}

SnapshotSet generate_snapshots(const AffineTruthModel& model,
                               const std::vector<double>& parameters, const LcpOptions& opts) {
  SnapshotSet set;
  const int n = static_cast<int>(parameters.size());
  set.parameters = parameters;
  set.u.resize(n);
  set.lambda.resize(n);
  set.slack.resize(n);
  set.iterations.resize(n);
  set.kkt_residuals.resize(n);
  parallel_for(n, [&](int i) {
    const double mu = parameters[i];
    try {
      const AssembledOperators ops = assemble_at(model, mu);
      const KktSolution sol = solve_mixed_kkt(ops.A, model.B, ops.f, ops.g, opts);
      set.u[i] = sol.u;
      set.lambda[i] = sol.lambda;
      set.slack[i] = sol.slack;
      set.iterations[i] = sol.iterations;
      set.kkt_residuals[i] = sol.kkt_residual;
    } catch (const SolverError& e) {
      std::ostringstream msg;
      msg << "truth solve failed at mu = " << mu << ": " << e.what();
      throw SolverError(msg.str());
    }
  });
  return set;
}

namespace {

double x_norm(const SparseMatrix& X, const Vector& v) { return std::sqrt(v.dot(X * v)); }

// Modified Gram-Schmidt with a reorthogonalization pass in the X inner
// product; returns kept orthonormal columns and their source indices.
Matrix x_orthonormalize(const std::vector<Vector>& candidates, const std::vector<int>& sources,
                        const SparseMatrix& X, double drop_tol, std::vector<int>& kept_sources) {
  std::vector<Vector> basis;
  kept_sources.clear();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    Vector v = candidates[k];
    const double initial = x_norm(X, v);
    if (!(initial > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : basis) v -= b.dot(X * v) * b;
    }
    const double remainder = x_norm(X, v);
    if (remainder < drop_tol * initial) continue;
    basis.push_back(v / remainder);
    kept_sources.push_back(sources[k]);
  }
  Matrix phi(candidates.empty() ? 0 : candidates.front().size(),
             static_cast<Index>(basis.size()));
  for (Index c = 0; c < phi.cols(); ++c) phi.col(c) = basis[c];
  return phi;
}

// Keep raw columns that carry a relative Euclidean remainder above drop_tol
// with respect to the span of the already-kept ones.
Matrix independence_filter(const std::vector<Vector>& candidates, const std::vector<int>& sources,
                           double drop_tol, std::vector<int>& kept_sources) {
  std::vector<Vector> kept, ortho;
  kept_sources.clear();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Vector& v = candidates[k];
    const double initial = v.norm();
    if (!(initial > 0.0)) continue;
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : ortho) w -= b.dot(w) * b;
    }
    const double remainder = w.norm();
    if (remainder < drop_tol * initial) continue;
    kept.push_back(v);
    ortho.push_back(w / remainder);
    kept_sources.push_back(sources[k]);
  }
  Matrix out(candidates.empty() ? 0 : candidates.front().size(),
             static_cast<Index>(kept.size()));
  for (Index c = 0; c < out.cols(); ++c) out.col(c) = kept[c];
  return out;
}

// Clip solver-noise negatives to zero; reject genuinely negative entries.
Vector clip_nonnegative(const Vector& v, double clip_tol, const char* what) {
  const double threshold = clip_tol * (1.0 + v.lpNorm<Eigen::Infinity>());
  Vector out = v;
  for (Index i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) {
      if (out[i] < -threshold) {
        std::ostringstream msg;
        msg << what << " has genuinely negative entry " << out[i] << " at index " << i;
        throw SolverError(msg.str());
      }
      out[i] = 0.0;
    }
  }
  return out;
}

}  // namespace

PrimalRBSpace build_primal_space(const SnapshotSet& snapshots, const AffineTruthModel& model,
                                 const SpaceOptions& opts) {
  if (snapshots.size() == 0) throw ValidationError("cannot build a space from zero snapshots");
  PrimalRBSpace space;

  // Multiplier cone basis first (generic supremizers depend on it).
  std::vector<Vector> lambda_cols;
  std::vector<int> lambda_src;
  for (int i = 0; i < snapshots.size(); ++i) {
    lambda_cols.push_back(clip_nonnegative(snapshots.lambda[i], opts.clip_tolerance,
                                           "multiplier snapshot"));
    lambda_src.push_back(i);
  }
  space.psi = independence_filter(lambda_cols, lambda_src, opts.drop_tolerance, space.psi_source);

  Eigen::SimplicialLDLT<SparseMatrix> xsolver(model.X_V);
  if (xsolver.info() != Eigen::Success) throw SolverError("X_V factorization failed");

  std::vector<Vector> field_cols;
  std::vector<int> field_src;
  for (int i = 0; i < snapshots.size(); ++i) {
    field_cols.push_back(snapshots.u[i]);
    field_src.push_back(i);
  }
  if (opts.generic_supremizers) {
    for (Index k = 0; k < space.psi.cols(); ++k) {
      field_cols.push_back(xsolver.solve(model.B.transpose() * space.psi.col(k)));
      field_src.push_back(-1);
      ++space.supremizer_count;
    }
  } else {
    // Single supremizer X_V t = f^1 (the unit-coefficient A^{-1} f).
    const Vector t = xsolver.solve(model.f_components[0]);
    if (t.norm() > 0.0) {
      field_cols.push_back(t);
      field_src.push_back(-1);
      space.supremizer_count = 1;
    }
  }
  space.phi =
      x_orthonormalize(field_cols, field_src, model.X_V, opts.drop_tolerance, space.phi_source);
  if (space.phi.cols() == 0) throw SolverError("primal space is empty after filtering");
  return space;
}

double nonnegative_fit_residual(const Matrix& K, const Vector& v) {
  const Index n = K.cols();
  if (n == 0) return v.norm();
  std::vector<char> passive(n, 0);
  Vector c = Vector::Zero(n);
  const double grad_tol = 1e-13 * (1.0 + (K.transpose() * v).lpNorm<Eigen::Infinity>());
  const int iteration_cap = 6 * static_cast<int>(n) + 12;
  for (int outer = 0; outer < iteration_cap; ++outer) {
    const Vector grad = K.transpose() * (v - K * c);
    int entering = -1;
    double best = grad_tol;
    for (Index i = 0; i < n; ++i) {
      if (!passive[i] && grad[i] > best) {
        entering = static_cast<int>(i);
        best = grad[i];
      }
    }
    if (entering < 0) break;
    passive[entering] = 1;
    for (int inner = 0; inner < iteration_cap; ++inner) {
      std::vector<int> idx;
      for (Index i = 0; i < n; ++i) {
        if (passive[i]) idx.push_back(static_cast<int>(i));
      }
      Matrix Kp(K.rows(), static_cast<Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) Kp.col(static_cast<Index>(k)) = K.col(idx[k]);
      const Vector cp = Kp.completeOrthogonalDecomposition().solve(v);
      bool interior = true;
      double alpha = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (cp[static_cast<Index>(k)] <= 0.0) {
          interior = false;
          const double ck = c[idx[k]];
          const double denom = ck - cp[static_cast<Index>(k)];
          if (denom > 0.0) alpha = std::min(alpha, ck / denom);
        }
      }
      if (interior) {
        c.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) c[idx[k]] = cp[static_cast<Index>(k)];
        break;
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double stepped = c[idx[k]] + alpha * (cp[static_cast<Index>(k)] - c[idx[k]]);
        c[idx[k]] = std::max(0.0, stepped);
        if (c[idx[k]] <= 0.0) {
          c[idx[k]] = 0.0;
          passive[idx[k]] = 0;
        }
      }
    }
  }
  return (K * c - v).norm();
}

DualRBSpace build_dual_space(const SnapshotSet& snapshots, const SpaceOptions& opts) {
  if (snapshots.size() == 0) throw ValidationError("cannot build a space from zero snapshots");
  DualRBSpace space;
  std::vector<Vector> cols;
  std::vector<int> src;
  for (int i = 0; i < snapshots.size(); ++i) {
    cols.push_back(clip_nonnegative(snapshots.slack[i], opts.clip_tolerance, "slack snapshot"));
    src.push_back(i);
  }
  Matrix zeta = independence_filter(cols, src, opts.drop_tolerance, space.source);

  // Reinstate linearly dependent snapshots that the kept cone does not cover:
  // the online solve can only reproduce what span_+ reaches.
  for (int i = 0; i < snapshots.size(); ++i) {
    if (std::find(space.source.begin(), space.source.end(), i) != space.source.end()) continue;
    const double norm = cols[i].norm();
    if (!(norm > 0.0)) continue;
    if (nonnegative_fit_residual(zeta, cols[i]) > opts.cone_tolerance * norm) {
      const auto insert_at = std::lower_bound(space.source.begin(), space.source.end(), i);
      const Index pos = insert_at - space.source.begin();
      Matrix grown(cols[i].size(), zeta.cols() + 1);
      grown.leftCols(pos) = zeta.leftCols(pos);
      grown.col(pos) = cols[i];
      grown.rightCols(zeta.cols() - pos) = zeta.rightCols(zeta.cols() - pos);
      zeta = std::move(grown);
      space.source.insert(insert_at, i);
    }
  }
  space.zeta = std::move(zeta);
  return space;
}

ReducedOperators reduce_operators(const AffineTruthModel& model, const DualAffineModel& dual,
                                  const BFactor& bf, const PrimalRBSpace& primal,
                                  const DualRBSpace& dual_space) {
  ReducedOperators ops;
  const Matrix& phi = primal.phi;
  const Matrix& psi = primal.psi;
  const Matrix& zeta = dual_space.zeta;

  for (const auto& Aq : model.A_components) ops.A_n.push_back(phi.transpose() * (Aq * phi));
  ops.B_n = psi.transpose() * (model.B * phi);
  for (const auto& fq : model.f_components) ops.f_n.push_back(phi.transpose() * fq);
  for (const auto& gq : model.g_components) ops.g_n.push_back(psi.transpose() * gq);

  const Matrix Y = bf.solve_columns(zeta);  // B^{-1} zeta
  for (const auto& Aq : model.A_components) {
    ops.Atilde_n.push_back(Y.transpose() * (Aq * Y));
  }
  for (const auto& ft : dual.ftilde_components) ops.ftilde_n.push_back(zeta.transpose() * ft);
  ops.pairing = psi.transpose() * zeta;
  return ops;
}

namespace {

// Gramian of the residual pieces under X_V^{-1}, with entries split into
// hi + lo double pairs (dots accumulated in extended precision).
ResidualGramian make_gramian(const std::vector<Vector>& pieces,
                             const Eigen::SimplicialLDLT<SparseMatrix>& xsolver) {
  const Index m = static_cast<Index>(pieces.size());
  ResidualGramian gram;
  gram.hi = Matrix::Zero(m, m);
  gram.lo = Matrix::Zero(m, m);
  std::vector<Vector> riesz(pieces.size());
  for (Index i = 0; i < m; ++i) riesz[i] = xsolver.solve(pieces[i]);
  // Compensated dots with exact products (Dot2): entries behave as if
  // computed in twice the working precision.  The certification tolerances
  // need this; the online quadratic form cancels almost completely when
  // snapshot coefficients are inserted.
  auto dd_dot = [](const Vector& a, const Vector& b) {
    double sum = 0.0, comp = 0.0;
    for (Index k = 0; k < a.size(); ++k) {
      const double prod = a[k] * b[k];
      const double prod_err = std::fma(a[k], b[k], -prod);
      const double t = sum + prod;
      const double sum_err =
          std::abs(sum) >= std::abs(prod) ? (sum - t) + prod : (prod - t) + sum;
      sum = t;
      comp += prod_err + sum_err;
    }
    return std::pair<double, double>{sum, comp};
  };
  // Exact symmetrization by averaging the two triangles: the averaged form
  // still factors through the piece sums, so inserting coefficients whose
  // combination vanishes yields a vanishing quadratic form.
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      const auto [s_ij, c_ij] = dd_dot(pieces[i], riesz[j]);
      const auto [s_ji, c_ji] = dd_dot(pieces[j], riesz[i]);
      const long double avg = 0.5L * (static_cast<long double>(s_ij) + s_ji +
                                      static_cast<long double>(c_ij) + c_ji);
      const double hi = static_cast<double>(avg);
      const double lo = static_cast<double>(avg - static_cast<long double>(hi));
      gram.hi(i, j) = gram.hi(j, i) = hi;
      gram.lo(i, j) = gram.lo(j, i) = lo;
    }
  }
  return gram;
}

}  // namespace

CertificationData build_certification(const AffineTruthModel& model,
                                      [[maybe_unused]] const DualAffineModel& dual,
                                      const BFactor& bf, const PrimalRBSpace& primal,
                                      const DualRBSpace& dual_space) {
  CertificationData cert;
  Eigen::SimplicialLDLT<SparseMatrix> xsolver(model.X_V);
  if (xsolver.info() != Eigen::Success) throw SolverError("X_V factorization failed");

  const int Qa = static_cast<int>(model.A_components.size());
  const int Qf = static_cast<int>(model.f_components.size());
  const int Qg = static_cast<int>(model.g_components.size());

  // Pieces of the primal-dual residual
  //   r(v) = <f(mu),v> - <A(mu) u_n^du, v> - <B v, lambda_n>,
  // with u_n^du = sum_q'' theta_g B^{-1} g^q'' - sum_l sbar_l B^{-1} zeta_l.
  {
    std::vector<Vector> pieces;
    ResidualGramian& g = cert.primal_dual;
    g.nf = Qf;
    g.ng = Qa * Qg;
    g.nzeta = Qa * static_cast<int>(dual_space.n_s());
    g.npsi = static_cast<int>(primal.n_q());
    for (int q = 0; q < Qf; ++q) pieces.push_back(model.f_components[q]);
    for (int qa = 0; qa < Qa; ++qa) {
      for (int qg = 0; qg < Qg; ++qg) {
        pieces.push_back(model.A_components[qa] * bf.solve(model.g_components[qg]));
      }
    }
    for (int qa = 0; qa < Qa; ++qa) {
      for (Index l = 0; l < dual_space.n_s(); ++l) {
        pieces.push_back(model.A_components[qa] * bf.solve(dual_space.zeta.col(l)));
      }
    }
    for (Index k = 0; k < primal.n_q(); ++k) {
      pieces.push_back(model.B.transpose() * primal.psi.col(k));
    }
    ResidualGramian built = make_gramian(pieces, xsolver);
    g.hi = built.hi;
    g.lo = built.lo;
  }

  // Pieces of the primal-only equality residual
  //   r_e(v) = <f(mu),v> - <A(mu) u_n^pr, v> - <B v, lambda_n>.
  {
    std::vector<Vector> pieces;
    ResidualGramian& g = cert.primal_only;
    g.nf = Qf;
    g.nphi = Qa * static_cast<int>(primal.n_v());
    g.npsi = static_cast<int>(primal.n_q());
    for (int q = 0; q < Qf; ++q) pieces.push_back(model.f_components[q]);
    for (int qa = 0; qa < Qa; ++qa) {
      for (Index i = 0; i < primal.n_v(); ++i) {
        pieces.push_back(model.A_components[qa] * primal.phi.col(i));
      }
    }
    for (Index k = 0; k < primal.n_q(); ++k) {
      pieces.push_back(model.B.transpose() * primal.psi.col(k));
    }
    ResidualGramian built = make_gramian(pieces, xsolver);
    g.hi = built.hi;
    g.lo = built.lo;
  }

  cert.beta = compute_beta(model, bf);
  if (model.exact_stability) {
    cert.stability.exact = true;
    cert.stability.certified = true;
  } else {
    const StabilityBounds sb = stability_bounds(model, model.parameter_box[0]);
    cert.stability.exact = false;
    cert.stability.alpha_fallback = sb.alpha_lb;
    cert.stability.gamma_fallback = sb.gamma_ub;
    cert.stability.certified = false;
  }
  return cert;
}

double compute_beta(const AffineTruthModel& model, const BFactor& bf) {
  // Largest eigenvalue of B^{-T} X_V B^{-1} by power iteration with the
  // Rayleigh quotient; beta = 1/sqrt of it.
  const Index n = model.dim_q();
  std::mt19937_64 rng(42);
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = static_cast<double>(rng() >> 11) * 0x1p-53 - 0.5;
  }
  x.normalize();
  auto apply = [&](const Vector& v) -> Vector {
    return bf.solve_transpose(model.X_V * bf.solve(v));
  };
  double theta = 0.0;
  const int max_iterations = 2'000'000;
  for (int iter = 0; iter < max_iterations; ++iter) {
    Vector y = apply(x);
    theta = x.dot(y);
    const double residual = (y - theta * x).norm();
    if (residual <= 1e-8 * std::abs(theta)) {
      if (!(theta > 0.0)) throw SolverError("inf-sup eigenproblem is not positive definite");
      return 1.0 / std::sqrt(theta);
    }
    const double norm = y.norm();
    if (!(norm > 0.0)) throw SolverError("power iteration broke down");
    x = y / norm;
  }
  throw SolverError("power iteration for the inf-sup constant did not converge");
}

StabilityBounds stability_bounds(const AffineTruthModel& model, double mu) {
  const ThetaValues theta = evaluate_theta(model, mu);
  StabilityBounds out;
  if (model.exact_stability) {
    out.alpha_lb = theta.a[0];
    out.gamma_ub = theta.a[0];
    out.certified = true;
    return out;
  }
  // Vertex-sampled Rayleigh estimate; not a certified lower bound.
  const Matrix X = Matrix(model.X_V);
  double alpha = std::numeric_limits<double>::infinity();
  double gamma = 0.0;
  for (const double vertex : {model.parameter_box[0], model.parameter_box[1]}) {
    const AssembledOperators ops = assemble_at(model, vertex);
    const Matrix A = Matrix(ops.A);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(0.5 * (A + A.transpose()), X);
    if (eig.info() != Eigen::Success) throw SolverError("stability eigensolve failed");
    alpha = std::min(alpha, eig.eigenvalues().minCoeff());
    gamma = std::max(gamma, eig.eigenvalues().maxCoeff());
  }
  out.alpha_lb = alpha;
  out.gamma_ub = gamma;
  out.certified = false;
  return out;
}

StabilityBounds OfflineArtifact::stability_at(double mu) const {
  const ThetaValues th = theta(mu);
  StabilityBounds out;
  if (cert.stability.exact) {
    out.alpha_lb = th.a[0];
    out.gamma_ub = th.a[0];
    out.certified = true;
  } else {
    out.alpha_lb = cert.stability.alpha_fallback;
    out.gamma_ub = cert.stability.gamma_fallback;
    out.certified = cert.stability.certified;
  }
  return out;
}

OfflineArtifact build_offline(const AffineTruthModel& model,
                              const std::vector<double>& snapshot_parameters,
                              const SpaceOptions& space_opts, const LcpOptions& opts) {
  OfflineArtifact artifact;
  artifact.spec = model.spec;
  artifact.parameter_box = model.parameter_box;
  artifact.snapshot_parameters = snapshot_parameters;

  const SnapshotSet snapshots = generate_snapshots(model, snapshot_parameters, opts);
  artifact.primal = build_primal_space(snapshots, model, space_opts);
  artifact.dual = build_dual_space(snapshots, space_opts);

  const BFactor bf = factorize_B(model);
  const DualAffineModel dual = assemble_dual_affine(model, bf);
  artifact.ops = reduce_operators(model, dual, bf, artifact.primal, artifact.dual);
  artifact.cert = build_certification(model, dual, bf, artifact.primal, artifact.dual);
  return artifact;
}

}  // namespace vicert
