// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
//
// Bit-accurate emulation of IEEE 754 binary16/binary32/binary64 arithmetic
// on a binary64 carrier: round-to-nearest-even, configurable flush-to-zero.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace pcroot {

enum class FpFormat : uint8_t { binary16, binary32, binary64 };

struct Precision {
  FpFormat format = FpFormat::binary64;
  bool flush_to_zero = true;

  bool operator==(const Precision&) const = default;
};

// Outcome of one emulated operation. `value` is exactly representable in the
// target format (or signed zero / infinity). `underflowed` means the exact
// result was non-zero yet rounded below the smallest normal of the format;
// with flush_to_zero the value is then a signed zero, otherwise the
// subnormal (or zero) rounding is kept and the flag still records tininess.
struct FpOutcome {
  double value = 0.0;
  bool underflowed = false;
  bool overflowed = false;
};

// Smallest positive normal value of the format: the underflow threshold.
double eps_uf(FpFormat f);
inline double eps_uf(Precision p) { return eps_uf(p.format); }

// Largest finite value of the format.
double max_finite(FpFormat f);

// Nearest representable value in the target format (ties to even).
// Magnitudes below eps_uf flush to signed zero when p.flush_to_zero is set.
FpOutcome round_to_ex(Precision p, double x);
double round_to(Precision p, double x);

// Exactly rounded product / sum at the target precision. Operands must be
// representable in the format (engine values always are, by construction).
FpOutcome fp_mul(Precision p, double a, double b);
FpOutcome fp_add(Precision p, double a, double b);

// Stable log-domain accumulation.
double log_add(double la, double lb);
double log_sum_exp(std::span<const double> logs);

// "f16" / "f32" / "f64"
std::optional<FpFormat> parse_fp_format(std::string_view name);
std::string_view fp_format_name(FpFormat f);

}  // namespace pcroot
