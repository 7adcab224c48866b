// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vicert {

// Invalid user input: bad problem spec, malformed config, inconsistent sizes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query parameter outside the certified parameter box.
class OutOfDomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failure: singular operator, eigensolver breakdown, ...
// (iteration limits raise the more specific NonConvergenceError in lcp.hpp).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Artifact file problems: bad magic, unknown version, truncation.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vicert
