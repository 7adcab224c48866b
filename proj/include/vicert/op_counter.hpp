// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace vicert {

// Thread-local tally of size-weighted linear-algebra work along instrumented
// paths.  Used to assert that the reduced online path performs no operation
// whose count grows with the truth dimension.
class OpCounter {
 public:
  static void reset();
  static std::uint64_t value();
  static void add(std::uint64_t amount);
};

}  // namespace vicert
