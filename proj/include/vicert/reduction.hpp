// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "vicert/lcp.hpp"
#include "vicert/slack.hpp"
#include "vicert/truth_model.hpp"
#include "vicert/types.hpp"

namespace vicert {

// n equidistant parameters in the box (endpoints included; midpoint for n=1).
std::vector<double> equidistant_parameters(const std::array<double, 2>& box, int n);

struct SnapshotSet {
  std::vector<double> parameters;
  std::vector<Vector> u, lambda, slack;
  std::vector<int> iterations;
  std::vector<double> kkt_residuals;
  int size() const { return static_cast<int>(parameters.size()); }
};

// Truth triples (u, lambda, s) per parameter; parallel over parameters.
SnapshotSet generate_snapshots(const AffineTruthModel& model,
                               const std::vector<double>& parameters,
                               const LcpOptions& opts = {});

struct SpaceOptions {
  double drop_tolerance = 1e-10;  // relative independence threshold
  double clip_tolerance = 1e-12;  // negative-entry clip threshold for cone bases
  double cone_tolerance = 1e-10;  // nonnegative-representation threshold (slack basis)
  bool generic_supremizers = false;  // X_V t_k = B^T psi_k per kept multiplier column
};

// phi: X_V-orthonormal field basis (snapshots + supremizers).
// psi: raw nonnegative multiplier snapshots spanning the reduced cone; kept
// unorthogonalized so nonnegative coefficient combinations stay in the cone.
struct PrimalRBSpace {
  Matrix phi;
  Matrix psi;
  int supremizer_count = 0;
  std::vector<int> phi_source;  // snapshot index per column, -1 for supremizers
  std::vector<int> psi_source;
  Index n_v() const { return phi.cols(); }
  Index n_q() const { return psi.cols(); }
};

PrimalRBSpace build_primal_space(const SnapshotSet& snapshots, const AffineTruthModel& model,
                                 const SpaceOptions& opts = {});

// zeta: raw nonnegative slack snapshots, order kept.  A snapshot is dropped
// only when it is numerically dependent AND nonnegatively representable in
// the kept columns: a linearly dependent snapshot outside the kept cone is
// reinstated, since span_+ coverage of every snapshot is what the online
// solve reproduces.  Reduced systems may therefore be rank-deficient; the
// solvers take rank-revealing subsystem solutions.
struct DualRBSpace {
  Matrix zeta;
  std::vector<int> source;
  Index n_s() const { return zeta.cols(); }
};

DualRBSpace build_dual_space(const SnapshotSet& snapshots, const SpaceOptions& opts = {});

// Residual of min_{c >= 0} ||K c - v|| (active-set nonnegative least squares).
double nonnegative_fit_residual(const Matrix& K, const Vector& v);

// Parameter-independent reduced operators (the online data).
struct ReducedOperators {
  std::vector<Matrix> A_n;       // per a-component, n_V x n_V
  Matrix B_n;                    // n_Q x n_V
  std::vector<Vector> f_n;       // per f-component
  std::vector<Vector> g_n;       // per g-component
  std::vector<Matrix> Atilde_n;  // per a-component, n_S x n_S
  std::vector<Vector> ftilde_n;  // per tilde-f component
  Matrix pairing;                // psi^T zeta, n_Q x n_S
};

ReducedOperators reduce_operators(const AffineTruthModel& model, const DualAffineModel& dual,
                                  const BFactor& bf, const PrimalRBSpace& primal,
                                  const DualRBSpace& dual_space);

// X_V^{-1}-inner products of the parameter-independent residual pieces, kept
// in split precision (gram = hi + lo) so that near-total cancellation at
// small residuals is resolved below the certification tolerances.
//
// Piece layout (row/column order):
//   primal-dual residual r:   [f^q | A^q' B^{-1} g^q'' | A^q' B^{-1} zeta_l | B^T psi_k]
//   primal-only residual r_e: [f^q | A^q' phi_i                            | B^T psi_k]
// Cross blocks are ordered q'-major (g/zeta/phi index minor).
struct ResidualGramian {
  Matrix hi, lo;
  int nf = 0;     // f components
  int ng = 0;     // Qa * Qg
  int nzeta = 0;  // Qa * n_S
  int nphi = 0;   // Qa * n_V
  int npsi = 0;   // n_Q
  Index size() const { return hi.rows(); }
};

struct StabilitySpec {
  bool exact = false;  // alpha(mu) = gamma(mu) = theta_a^1(mu) exactly
  double alpha_fallback = 0.0;
  double gamma_fallback = 0.0;
  bool certified = false;
};

struct CertificationData {
  ResidualGramian primal_dual;
  ResidualGramian primal_only;
  double beta = 0.0;
  StabilitySpec stability;
};

CertificationData build_certification(const AffineTruthModel& model, const DualAffineModel& dual,
                                      const BFactor& bf, const PrimalRBSpace& primal,
                                      const DualRBSpace& dual_space);

// Discrete inf-sup constant beta = sqrt(lambda_min(B X_V^{-1} B^T)) with the
// Euclidean multiplier product, computed by power iteration on B^{-T} X_V B^{-1}.
double compute_beta(const AffineTruthModel& model, const BFactor& bf);

struct StabilityBounds {
  double alpha_lb = 0.0;
  double gamma_ub = 0.0;
  bool certified = false;
};

// Exact (alpha, gamma) = (mu, mu) for the built-in models; a vertex-sampled
// Rayleigh estimate flagged non-certified otherwise.
StabilityBounds stability_bounds(const AffineTruthModel& model, double mu);

// Everything the online phase needs, persisted as the offline artifact.
struct OfflineArtifact {
  ModelSpec spec;
  std::array<double, 2> parameter_box{0.0, 0.0};
  std::vector<double> snapshot_parameters;
  PrimalRBSpace primal;
  DualRBSpace dual;
  ReducedOperators ops;
  CertificationData cert;

  Index n_v() const { return primal.n_v(); }
  Index n_q() const { return primal.n_q(); }
  Index n_s() const { return dual.n_s(); }
  ThetaValues theta(double mu) const { return builtin_theta(spec, parameter_box, mu); }
  StabilityBounds stability_at(double mu) const;
};

// Full offline pipeline for a snapshot parameter set.
OfflineArtifact build_offline(const AffineTruthModel& model,
                              const std::vector<double>& snapshot_parameters,
                              const SpaceOptions& space_opts = {}, const LcpOptions& opts = {});

void save_offline(const OfflineArtifact& artifact, const std::filesystem::path& path);
OfflineArtifact load_offline(const std::filesystem::path& path);

}  // namespace vicert
