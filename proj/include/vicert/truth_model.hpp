// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "vicert/mesh.hpp"
#include "vicert/types.hpp"

namespace vicert {

struct ThetaValues {
  Vector a, f, g;
};

// Affine-parametric truth discretization on the interior degrees of freedom:
//
//   A(mu) = sum_q theta_a^q(mu) A^q,   f(mu) = sum_q theta_f^q(mu) f^q,
//   g(mu) = sum_q theta_g^q(mu) g^q,   constraint  B u <= g(mu).
//
// The multiplier space uses the basis biorthogonal to the nodal one, so
// Q-coefficient vectors pair with V-nodal vectors through plain dot products.
// Immutable after assembly; safe to share read-only across threads.
struct AffineTruthModel {
  ModelSpec spec;
  Mesh mesh;
  std::vector<SparseMatrix> A_components;
  std::vector<Vector> f_components;
  std::vector<Vector> g_components;
  SparseMatrix B;    // N_Q x N_V, square invertible, parameter-independent
  SparseMatrix X_V;  // SPD inner-product matrix of V
  std::array<double, 2> parameter_box{0.0, 0.0};
  std::vector<std::function<double(double)>> theta_a, theta_f, theta_g;
  // True when a(v,v;mu) = theta_a^1(mu) * ||v||_V^2 holds exactly (X_V equals
  // the unit-coefficient stiffness), which makes alpha(mu) = gamma(mu) =
  // theta_a^1(mu) exact stability constants.
  bool exact_stability = false;

  Index dim_v() const { return A_components.front().rows(); }
  Index dim_q() const { return B.rows(); }
  bool in_domain(double mu) const {
    return mu >= parameter_box[0] && mu <= parameter_box[1];
  }
};

AffineTruthModel assemble_model(const ModelSpec& spec);

// Component-wise coefficient evaluation; rejects mu outside the box (bounds
// are only certified on the box).
ThetaValues evaluate_theta(const AffineTruthModel& model, double mu);

struct AssembledOperators {
  SparseMatrix A;
  Vector f, g;
};
AssembledOperators assemble_at(const AffineTruthModel& model, double mu);

// V-norm and Q-norm helpers (X_V energy norm, Euclidean multiplier norm).
double v_norm(const AffineTruthModel& model, const Vector& v);

// Theta evaluation for the built-in models without a truth assembly; used by
// the offline artifact so the online path never touches truth-sized data.
ThetaValues builtin_theta(const ModelSpec& spec, const std::array<double, 2>& box, double mu);

}  // namespace vicert
