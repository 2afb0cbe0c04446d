// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0

#include "pcroot/transform.hpp"

#include <cmath>

namespace pcroot {

Circuit scale_weights(const Circuit& c, double factor) {
  c.validate();
  if (!std::isfinite(factor) || factor <= 0.0)
    throw ValidationError("scale factor must be positive and finite");
  if (c.transform.kind != TransformMeta::Kind::none)
    throw RefusalError("circuit already carries a transform; recover first");

  Circuit out = c;
  for (Node& n : out.nodes)
    for (double& w : n.weights) w *= factor;
  out.transform.kind = TransformMeta::Kind::scaled;
  out.transform.scale = factor;
  return out;
}

Circuit nth_root_weights(const Circuit& c, uint32_t n) {
  c.validate();
  if (n < 1) throw ValidationError("root index must be >= 1");
  if (c.transform.kind != TransformMeta::Kind::none)
    throw RefusalError("circuit already carries a transform; recover first");
  if (check_structure(c).deterministic != Determinism::yes)
    throw RefusalError(
        "n-th-root transform needs a deterministic circuit: the root only "
        "distributes over a single active path");

  Circuit out = c;
  if (n > 1) {
    for (Node& node : out.nodes)
      for (double& w : node.weights)
        if (w > 0.0) w = std::exp(std::log(w) / static_cast<double>(n));
  }
  out.transform.kind = TransformMeta::Kind::nth_root;
  out.transform.root_n = n;
  return out;
}

double recover(double value, const TransformMeta& meta, uint32_t num_vars) {
  if (!(value >= 0.0)) throw ValidationError("recover expects a non-negative value");
  if (value == 0.0 || meta.kind == TransformMeta::Kind::none) return value;
  if (meta.kind == TransformMeta::Kind::nth_root && meta.root_n == 1) return value;
  if (meta.kind == TransformMeta::Kind::scaled && meta.scale == 1.0) return value;
  return std::exp(recover_log(std::log(value), meta, num_vars));
}

double recover_log(double log_value, const TransformMeta& meta, uint32_t num_vars) {
  switch (meta.kind) {
    case TransformMeta::Kind::nth_root:
      return static_cast<double>(meta.root_n) * log_value;
    case TransformMeta::Kind::scaled:
      return log_value - static_cast<double>(num_vars) * std::log(meta.scale);
    default:
      return log_value;
  }
}

}  // namespace pcroot
