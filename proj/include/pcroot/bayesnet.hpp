// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
//
// Discrete Bayesian networks: text format, exact brute-force oracles over
// the joint factorization, and compilation into smooth, decomposable,
// deterministic circuits by recursive conditioning.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcroot/circuit.hpp"
#include "pcroot/errors.hpp"
#include "pcroot/evidence.hpp"

namespace pcroot {

struct BayesNet {
  struct Variable {
    std::string name;
    uint32_t cardinality = 2;

    bool operator==(const Variable&) const = default;
  };

  std::vector<Variable> variables;
  std::vector<std::vector<uint32_t>> parents;  // per variable
  // Row-major tables: cpts[v][row * cardinality + value], rows enumerate
  // parent configurations lexicographically, first listed parent most
  // significant.
  std::vector<std::vector<double>> cpts;

  uint32_t num_vars() const { return static_cast<uint32_t>(variables.size()); }
  uint32_t cardinality(uint32_t v) const { return variables[v].cardinality; }
  int var_index(std::string_view name) const;
  size_t cpt_rows(uint32_t v) const;
  double cpt_entry(uint32_t v, size_t row, uint32_t val) const {
    return cpts[v][row * variables[v].cardinality + val];
  }
  size_t parent_row(uint32_t v, const Assignment& x) const;

  // Throws ValidationError: acyclicity, CPT shapes, row normalization.
  void validate() const;

  bool operator==(const BayesNet&) const = default;
};

BayesNet parse_bn(std::string_view text);

// Eq-of-factors product over all variables; x must be complete.
double joint_probability(const BayesNet& bn, const Assignment& x);

// Exact evidence probability by enumerating all completions. The state space
// (product of free-variable cardinalities) is guarded at 2^24. The default
// entry point parallelizes the enumeration; the serial variant is the
// reference implementation kept for testing and benchmarking.
inline constexpr uint64_t kBruteForceStateGuard = uint64_t{1} << 24;
double brute_force_query(const BayesNet& bn, const Evidence& e);
double brute_force_query_serial(const BayesNet& bn, const Evidence& e);

// Lowest-id-first topological order; throws on cycles.
std::vector<uint32_t> topological_order(const BayesNet& bn);

struct CompileOptions {
  std::vector<uint32_t> order;  // empty: variable-id order if topological
  bool memoize = true;
  uint64_t max_nodes = uint64_t{1} << 22;
};

// Recursive conditioning with connected-component decomposition. The output
// is smooth, decomposable and deterministic, keeps zero CPT entries as
// zero-weight edges, and multiplies exactly num_vars weights on every
// complete-assignment path.
Circuit compile(const BayesNet& bn, const CompileOptions& opts = {});

}  // namespace pcroot
