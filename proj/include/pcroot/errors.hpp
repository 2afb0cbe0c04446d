// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace pcroot {

// Malformed or inconsistent input: bad file syntax, out-of-range ids,
// violated model invariants.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally valid input that a computation declines to run on, e.g. a
// non-deterministic circuit handed to an operation whose correctness needs
// a single active path, or a state-space guard being exceeded.
struct RefusalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pcroot
