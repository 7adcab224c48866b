// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/truth_model.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "vicert/errors.hpp"

namespace vicert {

namespace {

// Unit-coefficient stiffness matrix restricted to the interior dofs.
SparseMatrix assemble_stiffness(const Mesh& mesh) {
  const int n = mesh.num_interior();
  std::vector<Eigen::Triplet<double>> trips;
  auto add = [&](int node_r, int node_c, double value) {
    const int r = mesh.dof_of_node[node_r];
    const int c = mesh.dof_of_node[node_c];
    if (r >= 0 && c >= 0) trips.emplace_back(r, c, value);
  };
  if (mesh.dimension == 1) {
    for (const auto& seg : mesh.segments) {
      const double h = mesh.nodes[seg[1]][0] - mesh.nodes[seg[0]][0];
      const double k = 1.0 / h;
      add(seg[0], seg[0], k);
      add(seg[1], seg[1], k);
      add(seg[0], seg[1], -k);
      add(seg[1], seg[0], -k);
    }
  } else {
    for (const auto& tri : mesh.triangles) {
      const auto& p0 = mesh.nodes[tri[0]];
      const auto& p1 = mesh.nodes[tri[1]];
      const auto& p2 = mesh.nodes[tri[2]];
      const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
      const double area = 0.5 * std::abs(det);
      // Gradients of the barycentric basis functions.
      const double bx[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
      const double by[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double v = (bx[a] * bx[b] + by[a] * by[b]) / (4.0 * area);
          add(tri[a], tri[b], v);
        }
      }
    }
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  K.makeCompressed();
  return K;
}

// Vector of integrals of the interior nodal basis functions (the action of a
// unit body force).  Exact for first-order elements.
Vector assemble_mass_action(const Mesh& mesh) {
  Vector m = Vector::Zero(mesh.num_interior());
  auto add = [&](int node, double value) {
    const int r = mesh.dof_of_node[node];
    if (r >= 0) m[r] += value;
  };
  if (mesh.dimension == 1) {
    for (const auto& seg : mesh.segments) {
      const double h = mesh.nodes[seg[1]][0] - mesh.nodes[seg[0]][0];
      add(seg[0], 0.5 * h);
      add(seg[1], 0.5 * h);
    }
  } else {
    for (const auto& tri : mesh.triangles) {
      const auto& p0 = mesh.nodes[tri[0]];
      const auto& p1 = mesh.nodes[tri[1]];
      const auto& p2 = mesh.nodes[tri[2]];
      const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
      const double area = 0.5 * std::abs(det);
      for (int a = 0; a < 3; ++a) add(tri[a], area / 3.0);
    }
  }
  return m;
}

SparseMatrix signed_identity(int n, double sign) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return sign * I;
}

}  // namespace

AffineTruthModel assemble_model(const ModelSpec& spec) {
  AffineTruthModel model;
  model.spec = spec;
  model.mesh = build_mesh(spec);
  const int n = model.mesh.num_interior();

  SparseMatrix K = assemble_stiffness(model.mesh);
  Vector mass = assemble_mass_action(model.mesh);

  model.A_components.push_back(K);
  model.X_V = K;  // H^1_0 seminorm inner product: alpha(mu) = gamma(mu) = mu
  model.exact_stability = true;
  model.theta_a = {[](double mu) { return mu; }};
  model.theta_f = {[](double) { return 1.0; }};
  model.theta_g = {[](double) { return 1.0; }};

  if (spec.model == 1) {
    // Rope over the obstacle h(x) = 5x - 10: constraint u >= h encoded as
    // B = -I, g_i = -h(x_i).
    model.f_components.push_back(-mass);
    model.B = signed_identity(n, -1.0);
    Vector g(n);
    for (int k = 0; k < n; ++k) {
      const double x = model.mesh.nodes[model.mesh.interior[k]][0];
      g[k] = -(5.0 * x - 10.0);
    }
    model.g_components.push_back(g);
    model.parameter_box = spec.parameter_box.value_or(std::array<double, 2>{0.001, 0.01});
  } else {
    // Membrane below the obstacle at height 0.1: constraint u <= 0.1,
    // B = I, g_i = 0.1.
    model.f_components.push_back(mass);
    model.B = signed_identity(n, 1.0);
    model.g_components.push_back(Vector::Constant(n, 0.1));
    model.parameter_box = spec.parameter_box.value_or(std::array<double, 2>{0.45, 0.55});
  }
  return model;
}

ThetaValues builtin_theta(const ModelSpec& spec, const std::array<double, 2>& box, double mu) {
  if (!(mu >= box[0] && mu <= box[1])) {
    std::ostringstream msg;
    msg << "parameter " << mu << " outside the certified box [" << box[0] << ", " << box[1]
        << "] for model " << spec.model;
    throw OutOfDomainError(msg.str());
  }
  ThetaValues theta;
  theta.a = Vector::Constant(1, mu);
  theta.f = Vector::Constant(1, 1.0);
  theta.g = Vector::Constant(1, 1.0);
  return theta;
}

ThetaValues evaluate_theta(const AffineTruthModel& model, double mu) {
  if (!model.in_domain(mu)) {
    std::ostringstream msg;
    msg << "parameter " << mu << " outside the certified box [" << model.parameter_box[0]
        << ", " << model.parameter_box[1] << "]";
    throw OutOfDomainError(msg.str());
  }
  ThetaValues theta;
  theta.a.resize(static_cast<Index>(model.theta_a.size()));
  theta.f.resize(static_cast<Index>(model.theta_f.size()));
  theta.g.resize(static_cast<Index>(model.theta_g.size()));
  for (Index q = 0; q < theta.a.size(); ++q) theta.a[q] = model.theta_a[q](mu);
  for (Index q = 0; q < theta.f.size(); ++q) theta.f[q] = model.theta_f[q](mu);
  for (Index q = 0; q < theta.g.size(); ++q) theta.g[q] = model.theta_g[q](mu);
  return theta;
}

AssembledOperators assemble_at(const AffineTruthModel& model, double mu) {
  const ThetaValues theta = evaluate_theta(model, mu);
  AssembledOperators out;
  out.A = theta.a[0] * model.A_components[0];
  for (Index q = 1; q < theta.a.size(); ++q) out.A += theta.a[q] * model.A_components[q];
  out.f = theta.f[0] * model.f_components[0];
  for (Index q = 1; q < theta.f.size(); ++q) out.f += theta.f[q] * model.f_components[q];
  out.g = theta.g[0] * model.g_components[0];
  for (Index q = 1; q < theta.g.size(); ++q) out.g += theta.g[q] * model.g_components[q];
  return out;
}

double v_norm(const AffineTruthModel& model, const Vector& v) {
  return std::sqrt(v.dot(model.X_V * v));
}

}  // namespace vicert
