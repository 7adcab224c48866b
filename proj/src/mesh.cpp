// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/mesh.hpp"

#include <string>

#include "vicert/errors.hpp"

namespace vicert {

int ModelSpec::effective_resolution() const {
  if (resolution == 0) return model == 2 ? 32 : 200;
  return resolution;
}

namespace {

Mesh build_interval_mesh(int n_elems) {
  Mesh mesh;
  mesh.dimension = 1;
  const double h = 1.0 / n_elems;
  mesh.nodes.reserve(n_elems + 1);
  for (int i = 0; i <= n_elems; ++i) {
    mesh.nodes.push_back({i * h, 0.0});
  }
  mesh.segments.reserve(n_elems);
  for (int i = 0; i < n_elems; ++i) {
    mesh.segments.push_back({i, i + 1});
  }
  mesh.dof_of_node.assign(mesh.nodes.size(), -1);
  for (int i = 1; i < n_elems; ++i) {
    mesh.dof_of_node[i] = static_cast<int>(mesh.interior.size());
    mesh.interior.push_back(i);
  }
  return mesh;
}

Mesh build_square_mesh(int n_cells) {
  Mesh mesh;
  mesh.dimension = 2;
  const int n = n_cells;
  const double h = 1.0 / n;
  // Node id = i * (n+1) + j for grid position (x=i*h, y=j*h): lexicographic
  // ordering by (x, y).
  auto node_id = [n](int i, int j) { return i * (n + 1) + j; };
  mesh.nodes.reserve((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      mesh.nodes.push_back({i * h, j * h});
    }
  }
  // Each cell is split along the same diagonal (lower-left to upper-right).
  mesh.triangles.reserve(2 * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int c00 = node_id(i, j);
      const int c10 = node_id(i + 1, j);
      const int c01 = node_id(i, j + 1);
      const int c11 = node_id(i + 1, j + 1);
      mesh.triangles.push_back({c00, c10, c11});
      mesh.triangles.push_back({c00, c11, c01});
    }
  }
  mesh.dof_of_node.assign(mesh.nodes.size(), -1);
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const int id = node_id(i, j);
      mesh.dof_of_node[id] = static_cast<int>(mesh.interior.size());
      mesh.interior.push_back(id);
    }
  }
  return mesh;
}

}  // namespace

Mesh build_mesh(const ModelSpec& spec) {
  if (spec.model != 1 && spec.model != 2) {
    throw ValidationError("model must be 1 or 2, got " + std::to_string(spec.model));
  }
  const int res = spec.effective_resolution();
  if (res < 2) {
    throw ValidationError("resolution must be at least 2 per direction, got " +
                          std::to_string(res));
  }
  return spec.model == 1 ? build_interval_mesh(res) : build_square_mesh(res);
}

}  // namespace vicert
