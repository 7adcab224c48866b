// Copyright (c) 2026 the vicert authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "vicert/op_counter.hpp"

namespace vicert {

namespace {
thread_local std::uint64_t counter = 0;
}

void OpCounter::reset() { counter = 0; }
std::uint64_t OpCounter::value() { return counter; }
void OpCounter::add(std::uint64_t amount) { counter += amount; }

}  // namespace vicert
