// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vicert/reduction.hpp"
#include "vicert/types.hpp"

namespace vicert {

// Reduced saddle solve; work depends only on the reduced dimensions.
struct OnlinePrimalSolution {
  Vector u_coeff;       // length n_V
  Vector lambda_coeff;  // length n_Q, componentwise >= 0
  int iterations = 0;
  double complementarity_gap = 0.0;
};
OnlinePrimalSolution solve_primal_rb(const OfflineArtifact& artifact, double mu,
                                     const LcpOptions& opts = {});

// Reduced slack LCP: 0 <= sbar  perp  (A~_n(mu) sbar - f~_n(mu)) >= 0.
// `multiplier` is the reduced complementarity residual; it is not a
// coefficient vector of multiplier basis functions.
struct OnlineDualSolution {
  Vector s_coeff;     // length n_S, componentwise >= 0
  Vector multiplier;  // length n_S, componentwise >= 0
  int iterations = 0;
  double complementarity_gap = 0.0;
};
OnlineDualSolution solve_dual_rb(const OfflineArtifact& artifact, double mu,
                                 const LcpOptions& opts = {});

// Componentwise clip onto the nonnegative cone (orthogonal projection under
// the Euclidean multiplier product).
Vector project_onto_cone(const Vector& q);

// Coefficients of B u - g(mu); equals -s for a truth solution u.
Vector detailed_inequality_residual(const AffineTruthModel& model, double mu,
                                    const Vector& u_truth);

Vector reconstruct_u_primal(const OfflineArtifact& artifact, const Vector& u_coeff);
Vector reconstruct_lambda(const OfflineArtifact& artifact, const Vector& lambda_coeff);
Vector reconstruct_s(const OfflineArtifact& artifact, const Vector& s_coeff);
// Feasible truth-length reconstruction u = B^{-1}(g(mu) - zeta sbar).
Vector reconstruct_u_dual(const DualRBSpace& dual_space, const Vector& s_coeff,
                          const AffineTruthModel& model, const BFactor& bf, double mu);

// Dual norm of a residual through the stored Gramian blocks; N-independent.
struct ResidualCoefficients {
  enum class Kind { primal_dual, primal_only };
  Kind kind = Kind::primal_dual;
  Vector field_coeff;   // sbar (primal-dual) or ubar (primal-only)
  Vector lambda_coeff;  // lambdabar
};
double residual_dual_norm(const CertificationData& cert, const ThetaValues& theta,
                          const ResidualCoefficients& coeffs);

struct PrimalDualBound {
  double delta_u = 0.0;
  double delta_lambda = 0.0;
  double residual_norm = 0.0;
  double d1 = 0.0, d2 = 0.0;
  double seconds = 0.0;
};
PrimalDualBound primal_dual_bound(const OfflineArtifact& artifact, double mu,
                                  const Vector& lambda_coeff, const Vector& s_coeff);

// Bound of the primal-only family; deliberately performs its projection steps
// at truth scale, so its cost grows with the truth dimension.
struct PrimalOnlyBound {
  double delta_u = 0.0;
  double delta_lambda = 0.0;
  double delta0 = 0.0, delta1 = 0.0, delta2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double seconds = 0.0;
};
PrimalOnlyBound primal_only_bound(const AffineTruthModel& model, const OfflineArtifact& artifact,
                                  double mu, const Vector& u_truth_reconstruction,
                                  const Vector& u_coeff, const Vector& lambda_coeff);

}  // namespace vicert
