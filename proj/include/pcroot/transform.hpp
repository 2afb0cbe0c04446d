// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
//
// Weight-space transformations that compress a circuit's dynamic range:
// uniform scaling (output scales by c^num_vars) and the n-th-root transform
// (output becomes the n-th root of the original), with exact inversion.
#pragma once

#include <cstdint>

#include "pcroot/circuit.hpp"

namespace pcroot {

// Multiplies every sum-edge weight by `factor` (> 0) and records the scale.
// Refuses circuits that already carry a transform.
Circuit scale_weights(const Circuit& c, double factor);

// Replaces every positive weight w by w^(1/n); zero weights stay zero.
// Requires a deterministic circuit: the root only distributes over the
// multiplications of a single active path.
Circuit nth_root_weights(const Circuit& c, uint32_t n);

// Inverts the recorded transform on a non-negative output value. Computed in
// log space so recovering tiny probabilities does not underflow again.
double recover(double value, const TransformMeta& meta, uint32_t num_vars);

// Same inversion on a natural-log value.
double recover_log(double log_value, const TransformMeta& meta, uint32_t num_vars);

}  // namespace pcroot
