// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vicert/config.hpp"

namespace vicert {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the invariant suite (discretization identities, solver oracles,
// slack-transform equivalences, reduction consistency, bound validity, cone
// projection properties, CSV determinism).  Tolerances scale with
// config.tol_scale so fault injection can be exercised from the CLI.
std::vector<CheckResult> run_verification(const ExperimentConfig& config);

}  // namespace vicert
