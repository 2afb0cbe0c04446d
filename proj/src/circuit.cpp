// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0

#include "pcroot/circuit.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "text_util.hpp"

namespace pcroot {

using detail::LineReader;
using detail::split_ws;

Node Node::make_indicator(uint32_t var, uint32_t val) {
  Node n;
  n.kind = NodeKind::indicator;
  n.var = var;
  n.val = val;
  return n;
}

Node Node::make_sum(std::vector<uint32_t> children, std::vector<double> weights) {
  Node n;
  n.kind = NodeKind::sum;
  n.children = std::move(children);
  n.weights = std::move(weights);
  return n;
}

Node Node::make_product(std::vector<uint32_t> children) {
  Node n;
  n.kind = NodeKind::product;
  n.children = std::move(children);
  return n;
}

int Circuit::var_index(std::string_view name) const {
  for (size_t i = 0; i < var_names.size(); ++i)
    if (var_names[i] == name) return static_cast<int>(i);
  return -1;
}

void Circuit::validate() const {
  if (nodes.empty()) throw ValidationError("circuit has no nodes");
  if (num_vars == 0) throw ValidationError("circuit has no variables");
  if (cardinalities.size() != num_vars)
    throw ValidationError("cardinality list does not match variable count");
  for (uint32_t v = 0; v < num_vars; ++v)
    if (cardinalities[v] < 2)
      throw ValidationError("variable " + std::to_string(v) + " has cardinality < 2");
  if (!var_names.empty() && var_names.size() != num_vars)
    throw ValidationError("variable name list does not match variable count");
  if (root_id >= nodes.size()) throw ValidationError("root id out of range");

  for (uint32_t id = 0; id < nodes.size(); ++id) {
    const Node& n = nodes[id];
    const std::string where = "node " + std::to_string(id);
    switch (n.kind) {
      case NodeKind::indicator:
        if (n.var >= num_vars) throw ValidationError(where + ": variable out of range");
        if (n.val >= cardinalities[n.var]) throw ValidationError(where + ": value out of range");
        break;
      case NodeKind::sum: {
        if (n.children.empty()) throw ValidationError(where + ": empty child list");
        if (n.children.size() != n.weights.size())
          throw ValidationError(where + ": child and weight counts differ");
        for (double w : n.weights)
          if (!std::isfinite(w) || w < 0.0)
            throw ValidationError(where + ": weight must be finite and >= 0");
        break;
      }
      case NodeKind::product: {
        if (n.children.empty()) throw ValidationError(where + ": empty child list");
        std::vector<uint32_t> sorted = n.children;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
          throw ValidationError(where + ": duplicate child in product");
        break;
      }
    }
    for (uint32_t ch : n.children)
      if (ch >= id)
        throw ValidationError(where + ": child " + std::to_string(ch) +
                              " does not precede its parent (topological order)");
  }

  switch (transform.kind) {
    case TransformMeta::Kind::none:
      break;
    case TransformMeta::Kind::scaled:
      if (!std::isfinite(transform.scale) || transform.scale <= 0.0)
        throw ValidationError("scale metadata must be positive and finite");
      break;
    case TransformMeta::Kind::nth_root:
      if (transform.root_n < 1) throw ValidationError("root metadata must be >= 1");
      break;
  }
}

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line_no) + ": " + msg);
}

uint64_t parse_uint(std::string_view tok, size_t line_no, const char* what) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    fail(line_no, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
  return v;
}

double parse_double(std::string_view tok, size_t line_no, const char* what) {
  std::string buf(tok);
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    fail(line_no, std::string("expected ") + what + ", got '" + buf + "'");
  return v;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  size_t line_no = 0;

  if (!reader.next(line, line_no)) throw ValidationError("empty circuit file");
  if (line != "pcir 1") fail(line_no, "expected header 'pcir 1'");

  if (!reader.next(line, line_no)) throw ValidationError("missing 'vars' line");
  auto toks = split_ws(line);
  if (toks.size() != 2 || toks[0] != "vars") fail(line_no, "expected 'vars <count>'");

  Circuit c;
  c.num_vars = static_cast<uint32_t>(parse_uint(toks[1], line_no, "variable count"));
  if (c.num_vars == 0) fail(line_no, "variable count must be positive");
  c.cardinalities.assign(c.num_vars, 2);

  std::vector<std::string> names(c.num_vars);
  bool any_named = false;
  bool saw_root = false;
  bool saw_node = false;

  while (reader.next(line, line_no)) {
    if (saw_root) fail(line_no, "content after 'root' line");
    toks = split_ws(line);
    const std::string_view kw = toks[0];

    if (kw == "card") {
      if (saw_node) fail(line_no, "'card' must precede node lines");
      if (toks.size() != 3) fail(line_no, "expected 'card <var> <cardinality>'");
      uint64_t var = parse_uint(toks[1], line_no, "variable id");
      uint64_t k = parse_uint(toks[2], line_no, "cardinality");
      if (var >= c.num_vars) fail(line_no, "variable id out of range");
      if (k < 2) fail(line_no, "cardinality must be >= 2");
      c.cardinalities[var] = static_cast<uint32_t>(k);
    } else if (kw == "name") {
      if (saw_node) fail(line_no, "'name' must precede node lines");
      if (toks.size() != 3) fail(line_no, "expected 'name <var> <identifier>'");
      uint64_t var = parse_uint(toks[1], line_no, "variable id");
      if (var >= c.num_vars) fail(line_no, "variable id out of range");
      names[var] = std::string(toks[2]);
      any_named = true;
    } else if (kw == "node") {
      saw_node = true;
      if (toks.size() < 3) fail(line_no, "truncated node line");
      uint64_t id = parse_uint(toks[1], line_no, "node id");
      if (id != c.nodes.size())
        fail(line_no, "node ids must be dense and ascending (expected " +
                          std::to_string(c.nodes.size()) + ")");
      const std::string_view kind = toks[2];
      if (kind == "indicator") {
        if (toks.size() != 5) fail(line_no, "expected 'node <id> indicator <var> <val>'");
        uint64_t var = parse_uint(toks[3], line_no, "variable id");
        uint64_t val = parse_uint(toks[4], line_no, "value index");
        if (var >= c.num_vars) fail(line_no, "indicator variable out of range");
        if (val >= c.cardinalities[var]) fail(line_no, "indicator value out of range");
        c.nodes.push_back(Node::make_indicator(static_cast<uint32_t>(var),
                                               static_cast<uint32_t>(val)));
      } else if (kind == "sum" || kind == "prod") {
        if (toks.size() < 4) fail(line_no, "truncated node line");
        uint64_t m = parse_uint(toks[3], line_no, "child count");
        if (m == 0) fail(line_no, "child count must be positive");
        const size_t per_child = kind == "sum" ? 2 : 1;
        if (toks.size() != 4 + per_child * m)
          fail(line_no, kind == "sum" ? "weight count does not match child count"
                                      : "child count does not match line");
        std::vector<uint32_t> children;
        std::vector<double> weights;
        children.reserve(m);
        for (uint64_t i = 0; i < m; ++i) {
          uint64_t ch = parse_uint(toks[4 + per_child * i], line_no, "child id");
          if (ch >= id) fail(line_no, "child " + std::to_string(ch) +
                                          " must reference an earlier node");
          children.push_back(static_cast<uint32_t>(ch));
          if (kind == "sum") {
            double w = parse_double(toks[5 + per_child * i], line_no, "weight");
            if (!std::isfinite(w) || w < 0.0)
              fail(line_no, "weight must be finite and >= 0");
            weights.push_back(w);
          }
        }
        if (kind == "sum")
          c.nodes.push_back(Node::make_sum(std::move(children), std::move(weights)));
        else
          c.nodes.push_back(Node::make_product(std::move(children)));
      } else {
        fail(line_no, "unknown node kind '" + std::string(kind) + "'");
      }
    } else if (kw == "meta") {
      if (toks.size() != 3) fail(line_no, "expected 'meta <kind> <value>'");
      if (c.transform.kind != TransformMeta::Kind::none)
        fail(line_no, "circuit carries more than one transform");
      if (toks[1] == "nth_root") {
        uint64_t n = parse_uint(toks[2], line_no, "root index");
        if (n < 1) fail(line_no, "root index must be >= 1");
        c.transform.kind = TransformMeta::Kind::nth_root;
        c.transform.root_n = static_cast<uint32_t>(n);
      } else if (toks[1] == "scaled") {
        double s = parse_double(toks[2], line_no, "scale constant");
        if (!std::isfinite(s) || s <= 0.0) fail(line_no, "scale must be positive and finite");
        c.transform.kind = TransformMeta::Kind::scaled;
        c.transform.scale = s;
      } else {
        fail(line_no, "unknown meta kind '" + std::string(toks[1]) + "'");
      }
    } else if (kw == "root") {
      if (toks.size() != 2) fail(line_no, "expected 'root <id>'");
      uint64_t id = parse_uint(toks[1], line_no, "node id");
      if (id >= c.nodes.size()) fail(line_no, "root id out of range");
      c.root_id = static_cast<uint32_t>(id);
      saw_root = true;
    } else {
      fail(line_no, "unknown directive '" + std::string(kw) + "'");
    }
  }

  if (!saw_root) throw ValidationError("missing 'root' line");
  if (any_named) {
    std::set<std::string> seen;
    for (uint32_t v = 0; v < c.num_vars; ++v) {
      if (names[v].empty())
        throw ValidationError("variable " + std::to_string(v) + " is missing a name");
      if (!seen.insert(names[v]).second)
        throw ValidationError("duplicate variable name '" + names[v] + "'");
    }
    c.var_names = std::move(names);
  }
  c.validate();
  return c;
}

std::string write_circuit(const Circuit& c) {
  std::string out;
  out.reserve(64 * c.nodes.size());
  out += "pcir 1\n";
  out += "vars " + std::to_string(c.num_vars) + "\n";
  for (size_t v = 0; v < c.var_names.size(); ++v)
    out += "name " + std::to_string(v) + " " + c.var_names[v] + "\n";
  for (uint32_t v = 0; v < c.num_vars; ++v)
    if (c.cardinalities[v] != 2)
      out += "card " + std::to_string(v) + " " + std::to_string(c.cardinalities[v]) + "\n";
  for (uint32_t id = 0; id < c.nodes.size(); ++id) {
    const Node& n = c.nodes[id];
    out += "node " + std::to_string(id);
    switch (n.kind) {
      case NodeKind::indicator:
        out += " indicator " + std::to_string(n.var) + " " + std::to_string(n.val);
        break;
      case NodeKind::sum:
        out += " sum " + std::to_string(n.children.size());
        for (size_t i = 0; i < n.children.size(); ++i) {
          out += " " + std::to_string(n.children[i]);
          out += " " + detail::fmt_g17(n.weights[i]);
        }
        break;
      case NodeKind::product:
        out += " prod " + std::to_string(n.children.size());
        for (uint32_t ch : n.children) out += " " + std::to_string(ch);
        break;
    }
    out += "\n";
  }
  switch (c.transform.kind) {
    case TransformMeta::Kind::none:
      break;
    case TransformMeta::Kind::scaled:
      out += "meta scaled " + detail::fmt_g17(c.transform.scale) + "\n";
      break;
    case TransformMeta::Kind::nth_root:
      out += "meta nth_root " + std::to_string(c.transform.root_n) + "\n";
      break;
  }
  out += "root " + std::to_string(c.root_id) + "\n";
  return out;
}

VarSet& VarSet::operator|=(const VarSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

bool VarSet::intersects(const VarSet& o) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & o.bits_[i]) return true;
  return false;
}

bool VarSet::contains(const VarSet& o) const {
  for (size_t i = 0; i < bits_.size(); ++i)
    if (o.bits_[i] & ~bits_[i]) return false;
  return true;
}

size_t VarSet::count() const {
  size_t n = 0;
  for (uint64_t w : bits_) n += static_cast<size_t>(__builtin_popcountll(w));
  return n;
}

std::vector<uint32_t> VarSet::to_vector() const {
  std::vector<uint32_t> out;
  for (uint32_t v = 0; v < bits_.size() * 64; ++v)
    if (test(v)) out.push_back(v);
  return out;
}

std::vector<VarSet> compute_scopes(const Circuit& c) {
  std::vector<VarSet> scopes(c.nodes.size(), VarSet(c.num_vars));
  for (uint32_t id = 0; id < c.nodes.size(); ++id) {
    const Node& n = c.nodes[id];
    if (n.kind == NodeKind::indicator) {
      scopes[id].set(n.var);
    } else {
      for (uint32_t ch : n.children) scopes[id] |= scopes[ch];
    }
  }
  return scopes;
}

std::string_view determinism_name(Determinism d) {
  switch (d) {
    case Determinism::yes: return "yes";
    case Determinism::no: return "no";
    default: return "unknown";
  }
}

namespace {

// Rectangular support summary of a node: per scope variable, the bitmask of
// values for which the node can evaluate to non-zero. `exact` records that
// the true support equals the product of these sets; when it does not, an
// overlap between hulls cannot prove non-determinism.
struct Support {
  std::map<uint32_t, uint64_t> allowed;
  bool exact = true;
  bool empty = false;  // node is constantly zero (e.g. all-zero-weight sum)
};

constexpr uint32_t kMaxSupportCard = 64;

uint64_t full_mask(uint32_t card) {
  return card >= 64 ? ~uint64_t{0} : (uint64_t{1} << card) - 1;
}

uint64_t mask_of(const Support& s, const Circuit& c, uint32_t var) {
  auto it = s.allowed.find(var);
  return it == s.allowed.end() ? full_mask(c.cardinality(var)) : it->second;
}

bool supports_disjoint(const Support& a, const Support& b, const Circuit& c) {
  if (a.empty || b.empty) return true;
  for (const auto& [var, mask] : a.allowed)
    if ((mask & mask_of(b, c, var)) == 0) return true;
  for (const auto& [var, mask] : b.allowed)
    if ((mask & mask_of(a, c, var)) == 0) return true;
  return false;
}

}  // namespace

StructReport check_structure(const Circuit& c) {
  c.validate();
  StructReport report;
  const std::vector<VarSet> scopes = compute_scopes(c);

  bool support_ok = true;  // support analysis applicable
  for (uint32_t card : c.cardinalities) support_ok &= card <= kMaxSupportCard;

  std::vector<Support> supports(support_ok ? c.nodes.size() : 0);
  bool any_unknown = !support_ok;
  bool any_overlap_proven = false;

  for (uint32_t id = 0; id < c.nodes.size(); ++id) {
    const Node& n = c.nodes[id];

    if (n.kind == NodeKind::indicator) {
      if (support_ok) {
        supports[id].allowed[n.var] = uint64_t{1} << n.val;
        supports[id].exact = true;
      }
      continue;
    }

    if (n.kind == NodeKind::product) {
      for (size_t i = 0; i + 1 < n.children.size(); ++i)
        for (size_t j = i + 1; j < n.children.size(); ++j)
          if (scopes[n.children[i]].intersects(scopes[n.children[j]])) {
            report.decomposable = false;
            report.violations.push_back(
                {id, "decomposability",
                 "children " + std::to_string(n.children[i]) + " and " +
                     std::to_string(n.children[j]) + " share scope variables"});
          }
      if (support_ok) {
        Support s;
        for (uint32_t ch : n.children) {
          const Support& cs = supports[ch];
          s.empty |= cs.empty;
          s.exact &= cs.exact;
          for (const auto& [var, mask] : cs.allowed) {
            auto [it, inserted] = s.allowed.emplace(var, mask);
            if (!inserted) it->second &= mask;  // overlapping-scope children intersect
          }
        }
        for (const auto& [var, mask] : s.allowed)
          if (mask == 0) s.empty = true;
        supports[id] = std::move(s);
      }
      continue;
    }

    // Sum node: smoothness, then the determinism support analysis over its
    // positive-weight children (zero-weight edges are absent for supports).
    for (size_t i = 1; i < n.children.size(); ++i)
      if (!(scopes[n.children[i]] == scopes[n.children[0]])) {
        report.smooth = false;
        report.violations.push_back(
            {id, "smoothness",
             "children " + std::to_string(n.children[0]) + " and " +
                 std::to_string(n.children[i]) + " have different scopes"});
        break;
      }

    if (!support_ok) continue;

    std::vector<uint32_t> live;
    for (size_t i = 0; i < n.children.size(); ++i)
      if (n.weights[i] > 0.0 && !supports[n.children[i]].empty)
        live.push_back(n.children[i]);

    bool overlap_no = false;
    bool overlap_unknown = false;
    for (size_t i = 0; i + 1 < live.size() && !overlap_no; ++i)
      for (size_t j = i + 1; j < live.size(); ++j) {
        const Support& a = supports[live[i]];
        const Support& b = supports[live[j]];
        if (supports_disjoint(a, b, c)) continue;
        if (a.exact && b.exact) {
          overlap_no = true;
          report.violations.push_back(
              {id, "determinism",
               "children " + std::to_string(live[i]) + " and " +
                   std::to_string(live[j]) + " have overlapping supports"});
          break;
        }
        overlap_unknown = true;
      }
    if (overlap_no) {
      report.deterministic = Determinism::no;
      any_overlap_proven = true;
    } else if (overlap_unknown) {
      any_unknown = true;
      report.violations.push_back(
          {id, "determinism",
           "child support overlap could not be decided (non-rectangular supports)"});
    }

    // Hull of the live children, and whether it stays exact: it does when
    // the children agree on every variable except at most one, on which they
    // are pairwise disjoint (the branch variable of compiled sums).
    Support s;
    if (live.empty()) {
      s.empty = true;
      supports[id] = std::move(s);
      continue;
    }
    const VarSet scope_vars = scopes[id];
    for (uint32_t var : scope_vars.to_vector()) {
      uint64_t u = 0;
      for (uint32_t ch : live) u |= mask_of(supports[ch], c, var);
      if (u != full_mask(c.cardinality(var))) s.allowed[var] = u;
    }
    if (live.size() == 1) {
      s.exact = supports[live[0]].exact;
    } else {
      bool all_exact = true;
      for (uint32_t ch : live) all_exact &= supports[ch].exact;
      uint32_t differing_vars = 0;
      bool branch_disjoint = true;
      for (uint32_t var : scope_vars.to_vector()) {
        uint64_t first = mask_of(supports[live[0]], c, var);
        bool differs = false;
        uint64_t seen = 0;
        bool disjoint = true;
        for (uint32_t ch : live) {
          uint64_t m = mask_of(supports[ch], c, var);
          differs |= m != first;
          if (seen & m) disjoint = false;
          seen |= m;
        }
        if (differs) {
          ++differing_vars;
          branch_disjoint &= disjoint;
        }
      }
      s.exact = all_exact && !overlap_no && !overlap_unknown &&
                differing_vars <= 1 && branch_disjoint;
    }
    supports[id] = std::move(s);
  }

  if (any_overlap_proven)
    report.deterministic = Determinism::no;
  else if (any_unknown)
    report.deterministic = Determinism::unknown;
  else
    report.deterministic = Determinism::yes;

  if (!support_ok)
    report.violations.push_back(
        {c.root_id, "determinism",
         "support analysis skipped: a variable cardinality exceeds " +
             std::to_string(kMaxSupportCard)});

  return report;
}

}  // namespace pcroot
