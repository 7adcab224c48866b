// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/online.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>

#include "vicert/errors.hpp"
#include "vicert/op_counter.hpp"

namespace vicert {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix affine_matrix(const std::vector<Matrix>& components, const Vector& coeff) {
  Matrix m = coeff[0] * components[0];
  for (Index q = 1; q < coeff.size(); ++q) m += coeff[q] * components[q];
  OpCounter::add(static_cast<std::uint64_t>(coeff.size()) * m.size());
  return m;
}

Vector affine_vector(const std::vector<Vector>& components, const Vector& coeff) {
  Vector v = coeff[0] * components[0];
  for (Index q = 1; q < coeff.size(); ++q) v += coeff[q] * components[q];
  OpCounter::add(static_cast<std::uint64_t>(coeff.size()) * v.size());
  return v;
}

// Coefficients of the tilde-f expansion: theta_f first, then theta_a x theta_g
// in q'-major order.
Vector tilde_coefficients(const ThetaValues& theta) {
  const Index qf = theta.f.size();
  const Index qa = theta.a.size();
  const Index qg = theta.g.size();
  Vector coeff(qf + qa * qg);
  coeff.head(qf) = theta.f;
  for (Index a = 0; a < qa; ++a) {
    for (Index g = 0; g < qg; ++g) coeff[qf + a * qg + g] = theta.a[a] * theta.g[g];
  }
  return coeff;
}

}  // namespace

OnlinePrimalSolution solve_primal_rb(const OfflineArtifact& artifact, double mu,
                                     const LcpOptions& opts) {
  const ThetaValues theta = artifact.theta(mu);
  if (artifact.n_q() > artifact.n_v()) {
    throw SolverError("reduced constraint count exceeds field dimension (inf-sup failure)");
  }
  const Matrix A_n = affine_matrix(artifact.ops.A_n, theta.a);
  const Vector f_n = affine_vector(artifact.ops.f_n, theta.f);
  Vector g_n;
  if (artifact.n_q() > 0) {
    g_n = affine_vector(artifact.ops.g_n, theta.g);
  } else {
    g_n = Vector();
  }
  const KktSolution sol = solve_mixed_kkt(A_n, artifact.ops.B_n, f_n, g_n, opts);
  OnlinePrimalSolution out;
  out.u_coeff = sol.u;
  out.lambda_coeff = sol.lambda;
  out.iterations = sol.iterations;
  out.complementarity_gap =
      sol.lambda.size() ? std::abs(sol.lambda.dot(sol.slack)) : 0.0;
  return out;
}

OnlineDualSolution solve_dual_rb(const OfflineArtifact& artifact, double mu,
                                 const LcpOptions& opts) {
  const ThetaValues theta = artifact.theta(mu);
  const Matrix M = affine_matrix(artifact.ops.Atilde_n, theta.a);
  const Vector ftilde = affine_vector(artifact.ops.ftilde_n, tilde_coefficients(theta));
  const LcpSolution sol = solve_lcp_active_set(DenseLcp{M, -ftilde}, opts);
  OnlineDualSolution out;
  out.s_coeff = sol.z;
  out.multiplier = sol.w;
  out.iterations = sol.iterations;
  out.complementarity_gap = sol.complementarity_gap;
  return out;
}

Vector project_onto_cone(const Vector& q) { return q.cwiseMax(0.0); }

Vector detailed_inequality_residual(const AffineTruthModel& model, double mu,
                                    const Vector& u_truth) {
  const AssembledOperators ops = assemble_at(model, mu);
  return model.B * u_truth - ops.g;
}

Vector reconstruct_u_primal(const OfflineArtifact& artifact, const Vector& u_coeff) {
  OpCounter::add(static_cast<std::uint64_t>(artifact.primal.phi.size()));
  return artifact.primal.phi * u_coeff;
}

Vector reconstruct_lambda(const OfflineArtifact& artifact, const Vector& lambda_coeff) {
  OpCounter::add(static_cast<std::uint64_t>(artifact.primal.psi.size()));
  return artifact.primal.psi * lambda_coeff;
}

Vector reconstruct_s(const OfflineArtifact& artifact, const Vector& s_coeff) {
  OpCounter::add(static_cast<std::uint64_t>(artifact.dual.zeta.size()));
  return artifact.dual.zeta * s_coeff;
}

Vector reconstruct_u_dual(const DualRBSpace& dual_space, const Vector& s_coeff,
                          const AffineTruthModel& model, const BFactor& bf, double mu) {
  if (s_coeff.size() != dual_space.n_s()) {
    throw ValidationError("reconstruct_u_dual: coefficient size mismatch");
  }
  if (s_coeff.size() && s_coeff.minCoeff() < 0.0) {
    throw ValidationError("reconstruct_u_dual: negative slack coefficients");
  }
  const AssembledOperators ops = assemble_at(model, mu);
  const Vector s = dual_space.zeta * s_coeff;
  return bf.solve(ops.g - s);
}

double residual_dual_norm(const CertificationData& cert, const ThetaValues& theta,
                          const ResidualCoefficients& coeffs) {
  const ResidualGramian& gram = coeffs.kind == ResidualCoefficients::Kind::primal_dual
                                    ? cert.primal_dual
                                    : cert.primal_only;
  const Index m = gram.size();
  Vector c = Vector::Zero(m);
  const Index qf = theta.f.size();
  const Index qa = theta.a.size();
  const Index qg = theta.g.size();
  if (qf != gram.nf) throw ValidationError("residual Gramian layout mismatch (f block)");
  c.head(qf) = theta.f;
  Index offset = qf;
  if (coeffs.kind == ResidualCoefficients::Kind::primal_dual) {
    for (Index a = 0; a < qa; ++a) {
      for (Index g = 0; g < qg; ++g) c[offset + a * qg + g] = -theta.a[a] * theta.g[g];
    }
    offset += gram.ng;
    const Index ns = coeffs.field_coeff.size();
    if (gram.nzeta != qa * ns) throw ValidationError("residual Gramian layout mismatch (zeta)");
    for (Index a = 0; a < qa; ++a) {
      for (Index l = 0; l < ns; ++l) c[offset + a * ns + l] = theta.a[a] * coeffs.field_coeff[l];
    }
    offset += gram.nzeta;
  } else {
    const Index nv = coeffs.field_coeff.size();
    if (gram.nphi != qa * nv) throw ValidationError("residual Gramian layout mismatch (phi)");
    for (Index a = 0; a < qa; ++a) {
      for (Index i = 0; i < nv; ++i) c[offset + a * nv + i] = -theta.a[a] * coeffs.field_coeff[i];
    }
    offset += gram.nphi;
  }
  if (gram.npsi != coeffs.lambda_coeff.size()) {
    throw ValidationError("residual Gramian layout mismatch (psi block)");
  }
  c.segment(offset, gram.npsi) = -coeffs.lambda_coeff;

  // Quadratic form accumulated in extended precision over the split entries.
  long double acc = 0.0L;
  long double scale = 0.0L;
  std::uint64_t terms = 0;
  for (Index i = 0; i < m; ++i) {
    const long double ci = c[i];
    if (ci == 0.0L) continue;
    for (Index j = 0; j < m; ++j) {
      const long double cj = c[j];
      if (cj == 0.0L) continue;
      const long double gij =
          static_cast<long double>(gram.hi(i, j)) + static_cast<long double>(gram.lo(i, j));
      acc += ci * cj * gij;
      scale += std::abs(static_cast<double>(ci * cj * gij));
      ++terms;
    }
  }
  OpCounter::add(static_cast<std::uint64_t>(m) * m);
  if (static_cast<double>(acc) < -1e-12 * (1.0 + static_cast<double>(scale))) {
    throw SolverError("residual quadratic form is significantly negative (corrupted Gramian?)");
  }
  // The cancelling form cannot certify values below its own accumulation
  // noise; report that level as the floor (bounds stay valid upper bounds).
  const long double noise = 5.5e-20L * static_cast<long double>(terms) * scale;
  const long double value = std::max(acc, noise);
  return value > 0.0L ? std::sqrt(static_cast<double>(value)) : 0.0;
}

PrimalDualBound primal_dual_bound(const OfflineArtifact& artifact, double mu,
                                  const Vector& lambda_coeff, const Vector& s_coeff) {
  const auto start = Clock::now();
  const ThetaValues theta = artifact.theta(mu);
  const StabilityBounds stab = artifact.stability_at(mu);

  PrimalDualBound out;
  ResidualCoefficients rc;
  rc.kind = ResidualCoefficients::Kind::primal_dual;
  rc.field_coeff = s_coeff;
  rc.lambda_coeff = lambda_coeff;
  out.residual_norm = residual_dual_norm(artifact.cert, theta, rc);
  out.d1 = out.residual_norm / (2.0 * stab.alpha_lb);

  // <s_n, lambda_n> through the stored pairing matrix, O(n_Q n_S).
  long double pairing = 0.0L;
  for (Index k = 0; k < lambda_coeff.size(); ++k) {
    if (lambda_coeff[k] == 0.0) continue;
    for (Index l = 0; l < s_coeff.size(); ++l) {
      pairing += static_cast<long double>(lambda_coeff[k]) *
                 static_cast<long double>(artifact.ops.pairing(k, l)) *
                 static_cast<long double>(s_coeff[l]);
    }
  }
  OpCounter::add(static_cast<std::uint64_t>(lambda_coeff.size()) * s_coeff.size() + 16);
  out.d2 = std::max(0.0, static_cast<double>(pairing)) / stab.alpha_lb;

  out.delta_u = out.d1 + std::sqrt(out.d1 * out.d1 + out.d2);
  out.delta_lambda = (out.residual_norm + stab.gamma_ub * out.delta_u) / artifact.cert.beta;
  out.seconds = seconds_since(start);
  return out;
}

PrimalOnlyBound primal_only_bound(const AffineTruthModel& model, const OfflineArtifact& artifact,
                                  double mu, const Vector& u_truth_reconstruction,
                                  const Vector& u_coeff, const Vector& lambda_coeff) {
  const auto start = Clock::now();
  const ThetaValues theta = artifact.theta(mu);
  const StabilityBounds stab = artifact.stability_at(mu);
  const double beta = artifact.cert.beta;

  PrimalOnlyBound out;
  ResidualCoefficients rc;
  rc.kind = ResidualCoefficients::Kind::primal_only;
  rc.field_coeff = u_coeff;
  rc.lambda_coeff = lambda_coeff;
  out.delta0 = residual_dual_norm(artifact.cert, theta, rc);

  // Truth-scale steps: inequality residual, cone projection, pairings.
  const Vector e_i = detailed_inequality_residual(model, mu, u_truth_reconstruction);
  const Vector projected = project_onto_cone(e_i);
  out.delta1 = projected.norm();
  const Vector lambda_truth = artifact.primal.psi * lambda_coeff;
  out.delta2 = std::max(0.0, lambda_truth.dot(projected));
  OpCounter::add(static_cast<std::uint64_t>(model.B.nonZeros()) +
                 4ull * static_cast<std::uint64_t>(e_i.size()) +
                 static_cast<std::uint64_t>(artifact.primal.psi.size()));

  out.c1 = (out.delta0 + stab.gamma_ub * out.delta1 / beta) / (2.0 * stab.alpha_lb);
  out.c2 = (out.delta0 * out.delta1 / beta + out.delta2) / stab.alpha_lb;
  out.delta_u = out.c1 + std::sqrt(std::max(0.0, out.c1 * out.c1 + out.c2));
  out.delta_lambda = (out.delta0 + stab.gamma_ub * out.delta_u) / beta;
  out.seconds = seconds_since(start);
  return out;
}

}  // namespace vicert
