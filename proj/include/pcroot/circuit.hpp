// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0
//
// Probabilistic circuits: a topologically ordered DAG of indicator, weighted
// sum and product nodes, with the text format, scope computation and the
// structural checks (smoothness, decomposability, determinism).
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pcroot/errors.hpp"

namespace pcroot {

enum class NodeKind : uint8_t { indicator, sum, product };

struct Node {
  NodeKind kind = NodeKind::indicator;
  uint32_t var = 0;  // indicator only
  uint32_t val = 0;  // indicator only
  std::vector<uint32_t> children;
  std::vector<double> weights;  // sum only, parallel to children

  static Node make_indicator(uint32_t var, uint32_t val);
  static Node make_sum(std::vector<uint32_t> children, std::vector<double> weights);
  static Node make_product(std::vector<uint32_t> children);

  bool operator==(const Node&) const = default;
};

// Record of the weight transformation a circuit carries, so the true output
// can be recovered after inference.
struct TransformMeta {
  enum class Kind : uint8_t { none, scaled, nth_root };
  Kind kind = Kind::none;
  double scale = 1.0;    // kind == scaled
  uint32_t root_n = 1;   // kind == nth_root

  bool operator==(const TransformMeta&) const = default;
};

struct Circuit {
  uint32_t num_vars = 0;
  std::vector<uint32_t> cardinalities;  // per variable, >= 2
  std::vector<std::string> var_names;   // empty when the circuit is unnamed
  std::vector<Node> nodes;              // index == node id, children precede parents
  uint32_t root_id = 0;
  TransformMeta transform;

  size_t node_count() const { return nodes.size(); }
  uint32_t cardinality(uint32_t var) const { return cardinalities[var]; }
  const Node& root() const { return nodes[root_id]; }

  // -1 when the name is unknown or the circuit is unnamed.
  int var_index(std::string_view name) const;

  // Throws ValidationError on any violated representation invariant.
  void validate() const;

  bool operator==(const Circuit&) const = default;
};

// Text format round trip. Parsing validates; writing is deterministic and
// prints weights with 17 significant digits so binary64 values survive.
Circuit parse_circuit(std::string_view text);
std::string write_circuit(const Circuit& c);

// Small fixed-capacity variable set used for scopes.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(uint32_t num_vars) : bits_((num_vars + 63) / 64, 0) {}

  void set(uint32_t v) { bits_[v >> 6] |= uint64_t{1} << (v & 63); }
  bool test(uint32_t v) const { return (bits_[v >> 6] >> (v & 63)) & 1; }
  VarSet& operator|=(const VarSet& o);
  bool intersects(const VarSet& o) const;
  bool contains(const VarSet& o) const;
  size_t count() const;
  std::vector<uint32_t> to_vector() const;

  bool operator==(const VarSet&) const = default;

 private:
  std::vector<uint64_t> bits_;
};

// Per-node variable scopes: indicators own {var}, inner nodes the union of
// their children.
std::vector<VarSet> compute_scopes(const Circuit& c);

// Determinism is reported three-valued: the support analysis collapses each
// node's support to per-variable allowed-value products, which is exact for
// compiler-produced circuits but only an over-approximation in general.
enum class Determinism : uint8_t { yes, no, unknown };

std::string_view determinism_name(Determinism d);

struct StructViolation {
  uint32_t node_id = 0;
  std::string property;  // "smoothness" | "decomposability" | "determinism"
  std::string message;
};

struct StructReport {
  bool smooth = true;
  bool decomposable = true;
  Determinism deterministic = Determinism::yes;
  std::vector<StructViolation> violations;

  bool all_hold() const {
    return smooth && decomposable && deterministic == Determinism::yes;
  }
};

StructReport check_structure(const Circuit& c);

}  // namespace pcroot
