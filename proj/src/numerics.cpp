// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0

#include "pcroot/numerics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace pcroot {

namespace {

struct FormatSpec {
  int sig_bits;  // significand bits including the implicit leading 1
  int emin;      // minimum normal exponent
  int emax;      // maximum exponent
};

constexpr FormatSpec kSpec16{11, -14, 15};
constexpr FormatSpec kSpec32{24, -126, 127};

const FormatSpec& spec_of(FpFormat f) {
  return f == FpFormat::binary16 ? kSpec16 : kSpec32;
}

// Midway point between the largest finite value and 2^(emax+1); magnitudes at
// or above it round to infinity under round-to-nearest-even.
double overflow_threshold(const FormatSpec& s) {
  return std::ldexp(2.0 - std::ldexp(1.0, -s.sig_bits), s.emax);
}

// Correctly rounded conversion to the format with gradual underflow; the
// result lives in the binary64 carrier. Requires x finite and non-zero.
double quantize(const FormatSpec& s, double x) {
  const double a = std::fabs(x);
  const int e = std::ilogb(a);
  const int quantum_exp = std::max(e, s.emin) - (s.sig_bits - 1);
  const double quantum = std::ldexp(1.0, quantum_exp);
  // a / quantum < 2^sig_bits (or < 2^(sig_bits-1) in the subnormal range), so
  // the division is exact and nearbyint resolves ties to even under the
  // default rounding mode.
  const double m = std::nearbyint(a / quantum);
  return std::copysign(m * quantum, x);
}

// Round an exact binary64 result into the target format, classifying
// underflow (tininess after rounding) and overflow.
FpOutcome finish(Precision p, double exact) {
  if (std::isnan(exact)) return {exact, false, false};
  if (std::isinf(exact)) return {exact, false, true};
  if (exact == 0.0) return {exact, false, false};

  const FormatSpec& s = spec_of(p.format);
  if (std::fabs(exact) >= overflow_threshold(s))
    return {std::copysign(HUGE_VAL, exact), false, true};

  double r = quantize(s, exact);
  const bool tiny = std::fabs(r) < std::ldexp(1.0, s.emin);
  if (tiny && p.flush_to_zero) r = std::copysign(0.0, exact);
  return {r, tiny, false};
}

FpOutcome finish64(Precision p, double r, bool exact_nonzero) {
  if (std::isnan(r)) return {r, false, false};
  if (std::isinf(r)) return {r, false, true};
  bool tiny = false;
  if (r != 0.0 && std::fabs(r) < DBL_MIN) {
    tiny = true;
    if (p.flush_to_zero) r = std::copysign(0.0, r);
  } else if (r == 0.0 && exact_nonzero) {
    tiny = true;
  }
  return {r, tiny, false};
}

}  // namespace

double eps_uf(FpFormat f) {
  switch (f) {
    case FpFormat::binary16: return std::ldexp(1.0, -14);
    case FpFormat::binary32: return std::ldexp(1.0, -126);
    default: return DBL_MIN;
  }
}

double max_finite(FpFormat f) {
  switch (f) {
    case FpFormat::binary16: return 65504.0;
    case FpFormat::binary32: return FLT_MAX;
    default: return DBL_MAX;
  }
}

FpOutcome round_to_ex(Precision p, double x) {
  if (p.format == FpFormat::binary64) return finish64(p, x, false);
  if (!std::isfinite(x) || x == 0.0)
    return {x, false, std::isinf(x)};
  return finish(p, x);
}

double round_to(Precision p, double x) { return round_to_ex(p, x).value; }

// Single-rounding note: binary16 and binary32 operands are exact in the
// binary64 carrier (11- and 24-bit significands). Their product therefore
// carries at most 48 significand bits and is computed exactly before the
// final rounding. For sums, rounding a p-bit-operand sum first to q bits and
// then to p bits equals direct rounding whenever q >= 2p + 2; here q = 53 and
// p <= 24, so the emulated result equals the correctly single-rounded one.

FpOutcome fp_mul(Precision p, double a, double b) {
  const double r = a * b;
  if (p.format == FpFormat::binary64)
    return finish64(p, r, a != 0.0 && b != 0.0 && std::isfinite(a) && std::isfinite(b));
  return finish(p, r);
}

FpOutcome fp_add(Precision p, double a, double b) {
  const double r = a + b;
  // An exactly zero sum of representable operands means a == -b: that
  // cancellation is exact, not an underflow.
  if (p.format == FpFormat::binary64) return finish64(p, r, false);
  return finish(p, r);
}

double log_add(double la, double lb) {
  if (std::isinf(la) && la < 0) return lb;
  if (std::isinf(lb) && lb < 0) return la;
  const double hi = std::max(la, lb);
  const double lo = std::min(la, lb);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> logs) {
  double hi = -HUGE_VAL;
  for (double l : logs) hi = std::max(hi, l);
  if (std::isinf(hi) && hi < 0) return hi;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - hi);
  return hi + std::log(sum);
}

std::optional<FpFormat> parse_fp_format(std::string_view name) {
  if (name == "f16") return FpFormat::binary16;
  if (name == "f32") return FpFormat::binary32;
  if (name == "f64") return FpFormat::binary64;
  return std::nullopt;
}

std::string_view fp_format_name(FpFormat f) {
  switch (f) {
    case FpFormat::binary16: return "f16";
    case FpFormat::binary32: return "f32";
    default: return "f64";
  }
}

}  // namespace pcroot
