// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace pcroot {

// A complete instantiation: one value index per variable.
using Assignment = std::vector<uint32_t>;

// A partial instantiation. Variables not set are marginalized over.
class Evidence {
 public:
  static constexpr int32_t kUnset = -1;

  Evidence() = default;
  explicit Evidence(uint32_t num_vars) : values_(num_vars, kUnset) {}

  static Evidence complete(const Assignment& a) {
    Evidence e(static_cast<uint32_t>(a.size()));
    for (uint32_t v = 0; v < a.size(); ++v) e.values_[v] = static_cast<int32_t>(a[v]);
    return e;
  }

  uint32_t num_vars() const { return static_cast<uint32_t>(values_.size()); }
  bool is_set(uint32_t var) const { return values_[var] != kUnset; }
  uint32_t value(uint32_t var) const { return static_cast<uint32_t>(values_[var]); }
  void set(uint32_t var, uint32_t val) { values_[var] = static_cast<int32_t>(val); }
  void clear(uint32_t var) { values_[var] = kUnset; }

  bool empty() const {
    for (int32_t v : values_)
      if (v != kUnset) return false;
    return true;
  }
  bool is_complete() const {
    for (int32_t v : values_)
      if (v == kUnset) return false;
    return !values_.empty();
  }
  size_t set_count() const {
    size_t n = 0;
    for (int32_t v : values_) n += (v != kUnset);
    return n;
  }

  // True when the indicator for (var, val) passes under this evidence.
  bool admits(uint32_t var, uint32_t val) const {
    return values_[var] == kUnset || values_[var] == static_cast<int32_t>(val);
  }

  bool operator==(const Evidence&) const = default;

 private:
  std::vector<int32_t> values_;
};

}  // namespace pcroot
