// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "vicert/types.hpp"

namespace vicert {

// Which obstacle model to assemble and at what resolution.
//   model 1: elastic rope over a rigid obstacle on (0,1)
//   model 2: elastic membrane under a rigid obstacle on (0,1)^2
struct ModelSpec {
  int model = 1;
  int resolution = 0;  // segments (1d) or cells per direction (2d); 0 = model default
  std::optional<std::array<double, 2>> parameter_box;  // override of the certified box

  int effective_resolution() const;
};

// Structured simplicial mesh of the unit interval or unit square.
// Nodes are ordered lexicographically by coordinate.  `interior` lists the
// non-Dirichlet nodes in that order and fixes the V degree-of-freedom order.
struct Mesh {
  int dimension = 1;
  std::vector<std::array<double, 2>> nodes;   // (x, 0) in 1d
  std::vector<std::array<int, 2>> segments;   // 1d connectivity
  std::vector<std::array<int, 3>> triangles;  // 2d connectivity
  std::vector<int> interior;                  // node ids of interior nodes
  std::vector<int> dof_of_node;               // node id -> dof index, -1 on the boundary

  int num_interior() const { return static_cast<int>(interior.size()); }
};

Mesh build_mesh(const ModelSpec& spec);

}  // namespace vicert
