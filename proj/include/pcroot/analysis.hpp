// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
//
// Dynamic-range analysis: the minimum possible non-zero circuit output, the
// minimal root index for a target precision, and per-evidence range reports.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcroot/circuit.hpp"
#include "pcroot/evidence.hpp"
#include "pcroot/numerics.hpp"

namespace pcroot {

struct PminResult {
  double value = 0.0;      // may underflow binary64 for deep circuits
  double log_value = 0.0;  // natural log, always meaningful
  Assignment witness;      // a complete assignment attaining the minimum
};

// Minimum non-zero output over complete assignments, by a min-sum pass in
// log space. Requires a deterministic circuit in which every sum has at
// least one positive weight; refuses anything else, since the node-wise
// minimum would not match the assignment-wise one.
PminResult p_min(const Circuit& c);

// Smallest integer n with (p_min)^(1/n) >= eps_uf, plus an optional safety
// margin. The log-domain entry point accepts values far below the smallest
// binary64 normal.
uint32_t root_index(double p_min, Precision p, uint32_t margin = 0);
uint32_t root_index_log(double log_p_min, Precision p, uint32_t margin = 0);

struct RangeRow {
  uint32_t evidence_id = 0;
  FpFormat format = FpFormat::binary64;
  bool ftz = true;
  double reference_value = 0.0;  // binary64 recovered reference
  double emulated_value = 0.0;
  double recovered_value = 0.0;
  uint64_t underflow_count = 0;
  int32_t rescale_k = 0;
  double rel_error = 0.0;
};

struct RangeReport {
  std::vector<RangeRow> rows;
  uint64_t ops_per_eval = 0;  // emulated mul/add operations per evaluation
};

struct RangeOptions {
  bool flush_to_zero = true;
  double rescale_sf = 0.0;          // > 1 enables dynamic rescaling
  const Circuit* reference = nullptr;  // reference circuit, defaults to the input
};

// One row per (evidence, precision), evidence outer, in deterministic order.
// Rows are independent and evaluated in parallel.
RangeReport range_report(const Circuit& c, const std::vector<Evidence>& evidence,
                         const std::vector<FpFormat>& precisions,
                         const RangeOptions& opts = {});

// CSV with the fixed header
// evidence_id,precision,ftz,reference_value,emulated_value,recovered_value,underflow_count,rescale_k,rel_error
std::string range_report_csv(const RangeReport& report);

}  // namespace pcroot
