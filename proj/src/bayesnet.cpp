// Copyright (c) 2025 pcroot authors
// SPDX-License-Identifier: Apache-2.0

#include "pcroot/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "text_util.hpp"

namespace pcroot {

using detail::LineReader;
using detail::split_ws;

int BayesNet::var_index(std::string_view name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<int>(i);
  return -1;
}

size_t BayesNet::cpt_rows(uint32_t v) const {
  size_t rows = 1;
  for (uint32_t p : parents[v]) rows *= variables[p].cardinality;
  return rows;
}

size_t BayesNet::parent_row(uint32_t v, const Assignment& x) const {
  size_t row = 0;
  for (uint32_t p : parents[v]) row = row * variables[p].cardinality + x[p];
  return row;
}

void BayesNet::validate() const {
  const uint32_t n = num_vars();
  if (n == 0) throw ValidationError("network has no variables");
  if (parents.size() != n || cpts.size() != n)
    throw ValidationError("parent/CPT lists do not match variable count");

  std::set<std::string> seen;
  for (const Variable& v : variables) {
    if (v.cardinality < 2)
      throw ValidationError("variable '" + v.name + "' has cardinality < 2");
    if (!seen.insert(v.name).second)
      throw ValidationError("duplicate variable name '" + v.name + "'");
  }

  for (uint32_t v = 0; v < n; ++v)
    for (uint32_t p : parents[v])
      if (p >= n) throw ValidationError("parent id out of range");

  topological_order(*this);  // throws on cycles

  for (uint32_t v = 0; v < n; ++v) {
    const size_t rows = cpt_rows(v);
    const uint32_t card = variables[v].cardinality;
    if (cpts[v].size() != rows * card)
      throw ValidationError("CPT for '" + variables[v].name + "' has wrong shape");
    for (size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (uint32_t val = 0; val < card; ++val) {
        double e = cpt_entry(v, r, val);
        if (!(e >= 0.0 && e <= 1.0))
          throw ValidationError("CPT entry for '" + variables[v].name +
                                "' outside [0, 1]");
        sum += e;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw ValidationError("CPT row " + std::to_string(r) + " for '" +
                              variables[v].name + "' sums to " +
                              detail::fmt_g17(sum) + ", not 1");
    }
  }
}

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

BayesNet parse_bn(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  size_t line_no = 0;

  if (!reader.next(line, line_no)) throw ValidationError("empty network file");
  if (line != "bnet 1") fail(line_no, "expected header 'bnet 1'");

  BayesNet bn;
  std::map<std::string, uint32_t, std::less<>> index;
  std::vector<bool> has_parents_line;
  std::vector<bool> has_cpt;

  auto lookup = [&](std::string_view name, size_t ln) -> uint32_t {
    auto it = index.find(name);
    if (it == index.end()) fail(ln, "unknown variable '" + std::string(name) + "'");
    return it->second;
  };

  // Pending CPT block: rows are consumed as plain probability lines.
  int cpt_var = -1;
  size_t cpt_row = 0;

  while (reader.next(line, line_no)) {
    auto toks = split_ws(line);
    const std::string_view kw = toks[0];

    if (cpt_var >= 0) {
      // Inside a CPT block every line must be one row of probabilities.
      const uint32_t v = static_cast<uint32_t>(cpt_var);
      const uint32_t card = bn.variables[v].cardinality;
      if (toks.size() != card)
        fail(line_no, "CPT row for '" + bn.variables[v].name + "' needs " +
                          std::to_string(card) + " probabilities, got " +
                          std::to_string(toks.size()));
      for (const auto& tok : toks) {
        std::string buf(tok);
        char* end = nullptr;
        double p = std::strtod(buf.c_str(), &end);
        if (end != buf.c_str() + buf.size())
          fail(line_no, "expected probability, got '" + buf + "'");
        bn.cpts[v].push_back(p);
      }
      if (++cpt_row == bn.cpt_rows(v)) {
        has_cpt[v] = true;
        cpt_var = -1;
      }
      continue;
    }

    if (kw == "var") {
      if (toks.size() != 3) fail(line_no, "expected 'var <name> <cardinality>'");
      std::string name(toks[1]);
      if (index.count(name)) fail(line_no, "duplicate variable '" + name + "'");
      uint64_t card = 0;
      try {
        card = std::stoull(std::string(toks[2]));
      } catch (...) {
        fail(line_no, "expected cardinality");
      }
      if (card < 2) fail(line_no, "cardinality must be >= 2");
      index.emplace(name, bn.num_vars());
      bn.variables.push_back({std::move(name), static_cast<uint32_t>(card)});
      bn.parents.emplace_back();
      bn.cpts.emplace_back();
      has_parents_line.push_back(false);
      has_cpt.push_back(false);
    } else if (kw == "parents") {
      if (toks.size() < 2) fail(line_no, "expected 'parents <name> [parent...]'");
      uint32_t v = lookup(toks[1], line_no);
      if (has_parents_line[v])
        fail(line_no, "duplicate parents line for '" + bn.variables[v].name + "'");
      if (has_cpt[v])
        fail(line_no, "parents must be declared before the CPT");
      for (size_t i = 2; i < toks.size(); ++i)
        bn.parents[v].push_back(lookup(toks[i], line_no));
      has_parents_line[v] = true;
    } else if (kw == "cpt") {
      if (toks.size() != 2) fail(line_no, "expected 'cpt <name>'");
      uint32_t v = lookup(toks[1], line_no);
      if (has_cpt[v]) fail(line_no, "duplicate CPT for '" + bn.variables[v].name + "'");
      cpt_var = static_cast<int>(v);
      cpt_row = 0;
      bn.cpts[v].reserve(bn.cpt_rows(v) * bn.variables[v].cardinality);
    } else {
      fail(line_no, "unknown directive '" + std::string(kw) + "'");
    }
  }

  if (cpt_var >= 0)
    throw ValidationError("truncated CPT for '" +
                          bn.variables[cpt_var].name + "'");
  for (uint32_t v = 0; v < bn.num_vars(); ++v)
    if (!has_cpt[v])
      throw ValidationError("missing CPT for '" + bn.variables[v].name + "'");

  bn.validate();
  return bn;
}

double joint_probability(const BayesNet& bn, const Assignment& x) {
  double p = 1.0;
  for (uint32_t v = 0; v < bn.num_vars(); ++v)
    p *= bn.cpt_entry(v, bn.parent_row(v, x), x[v]);
  return p;
}

namespace {

// Free variables of the evidence plus the guard on their joint state count.
std::vector<uint32_t> free_vars_guarded(const BayesNet& bn, const Evidence& e,
                                        uint64_t& total) {
  if (e.num_vars() != bn.num_vars())
    throw ValidationError("evidence variable count does not match network");
  std::vector<uint32_t> free;
  total = 1;
  for (uint32_t v = 0; v < bn.num_vars(); ++v) {
    if (e.is_set(v)) {
      if (e.value(v) >= bn.cardinality(v))
        throw ValidationError("evidence value out of range for variable " +
                              std::to_string(v));
      continue;
    }
    free.push_back(v);
    total *= bn.cardinality(v);
    if (total > kBruteForceStateGuard)
      throw RefusalError("state space exceeds the brute-force guard (2^24)");
  }
  return free;
}

void decode_completion(const std::vector<uint32_t>& free, const BayesNet& bn,
                       uint64_t rank, Assignment& x) {
  for (size_t i = free.size(); i-- > 0;) {
    const uint32_t v = free[i];
    const uint32_t card = bn.cardinality(v);
    x[v] = static_cast<uint32_t>(rank % card);
    rank /= card;
  }
}

Assignment base_assignment(const BayesNet& bn, const Evidence& e) {
  Assignment x(bn.num_vars(), 0);
  for (uint32_t v = 0; v < bn.num_vars(); ++v)
    if (e.is_set(v)) x[v] = e.value(v);
  return x;
}

}  // namespace

double brute_force_query_serial(const BayesNet& bn, const Evidence& e) {
  uint64_t total = 0;
  const std::vector<uint32_t> free = free_vars_guarded(bn, e, total);
  Assignment x = base_assignment(bn, e);
  double sum = 0.0;
  for (uint64_t rank = 0; rank < total; ++rank) {
    decode_completion(free, bn, rank, x);
    sum += joint_probability(bn, x);
  }
  return sum;
}

double brute_force_query(const BayesNet& bn, const Evidence& e) {
  uint64_t total = 0;
  const std::vector<uint32_t> free = free_vars_guarded(bn, e, total);
  const Assignment base = base_assignment(bn, e);
  double sum = 0.0;
#pragma omp parallel
  {
    Assignment x = base;
#pragma omp for reduction(+ : sum) schedule(static)
    for (int64_t rank = 0; rank < static_cast<int64_t>(total); ++rank) {
      decode_completion(free, bn, static_cast<uint64_t>(rank), x);
      sum += joint_probability(bn, x);
    }
  }
  return sum;
}

std::vector<uint32_t> topological_order(const BayesNet& bn) {
  const uint32_t n = bn.num_vars();
  std::vector<uint32_t> pending(n, 0);
  std::vector<std::vector<uint32_t>> children(n);
  for (uint32_t v = 0; v < n; ++v) {
    pending[v] = static_cast<uint32_t>(bn.parents[v].size());
    for (uint32_t p : bn.parents[v]) children[p].push_back(v);
  }
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  for (uint32_t v = 0; v < n; ++v)
    if (pending[v] == 0) ready.push(v);
  std::vector<uint32_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    uint32_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (uint32_t ch : children[v])
      if (--pending[ch] == 0) ready.push(ch);
  }
  if (order.size() != n) throw ValidationError("parent graph contains a cycle");
  return order;
}

namespace {

// Recursive-conditioning compiler. Contexts are memoized by the remaining
// component together with the values of its assigned parents; indicators are
// shared globally.
class Compiler {
 public:
  Compiler(const BayesNet& bn, const std::vector<uint32_t>& order,
           const CompileOptions& opts)
      : bn_(bn), opts_(opts), rank_(bn.num_vars()) {
    for (uint32_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
    assigned_.assign(bn.num_vars(), -1);
  }

  Circuit run() {
    std::vector<uint32_t> all(bn_.num_vars());
    for (uint32_t v = 0; v < bn_.num_vars(); ++v) all[v] = v;
    const auto comps = components(all);
    uint32_t root;
    if (comps.size() == 1) {
      root = build(comps[0]);
    } else {
      std::vector<uint32_t> children;
      children.reserve(comps.size());
      for (const auto& comp : comps) children.push_back(build(comp));
      root = add_node(Node::make_product(std::move(children)));
    }
    Circuit c;
    c.num_vars = bn_.num_vars();
    c.cardinalities.resize(c.num_vars);
    c.var_names.resize(c.num_vars);
    for (uint32_t v = 0; v < c.num_vars; ++v) {
      c.cardinalities[v] = bn_.cardinality(v);
      c.var_names[v] = bn_.variables[v].name;
    }
    c.nodes = std::move(nodes_);
    c.root_id = root;
    c.validate();
    return c;
  }

 private:
  using Key = std::pair<std::vector<uint32_t>, std::vector<std::pair<uint32_t, int32_t>>>;

  uint32_t add_node(Node n) {
    if (nodes_.size() >= opts_.max_nodes)
      throw RefusalError("compiled circuit exceeds the node guard");
    nodes_.push_back(std::move(n));
    return static_cast<uint32_t>(nodes_.size() - 1);
  }

  uint32_t indicator(uint32_t var, uint32_t val) {
    auto [it, inserted] = indicators_.emplace(std::make_pair(var, val), 0u);
    if (inserted) it->second = add_node(Node::make_indicator(var, val));
    return it->second;
  }

  // Connected components of `vars` under the remaining-factor edges: each
  // unassigned variable is linked to its unassigned parents.
  std::vector<std::vector<uint32_t>> components(const std::vector<uint32_t>& vars) {
    std::map<uint32_t, uint32_t> comp_of;
    std::map<uint32_t, std::vector<uint32_t>> adj;
    for (uint32_t v : vars) adj[v];
    for (uint32_t v : vars)
      for (uint32_t p : bn_.parents[v])
        if (assigned_[p] < 0 && adj.count(p)) {
          adj[v].push_back(p);
          adj[p].push_back(v);
        }
    std::vector<std::vector<uint32_t>> comps;
    std::set<uint32_t> visited;
    for (uint32_t v : vars) {
      if (visited.count(v)) continue;
      std::vector<uint32_t> comp, stack{v};
      visited.insert(v);
      while (!stack.empty()) {
        uint32_t u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        for (uint32_t w : adj[u])
          if (visited.insert(w).second) stack.push_back(w);
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
    // Components ordered by their smallest variable for determinism.
    std::sort(comps.begin(), comps.end());
    return comps;
  }

  Key make_key(const std::vector<uint32_t>& comp) const {
    std::vector<std::pair<uint32_t, int32_t>> ctx;
    for (uint32_t v : comp)
      for (uint32_t p : bn_.parents[v])
        if (assigned_[p] >= 0) ctx.emplace_back(p, assigned_[p]);
    std::sort(ctx.begin(), ctx.end());
    ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
    return {comp, std::move(ctx)};
  }

  uint32_t build(const std::vector<uint32_t>& comp) {
    Key key;
    if (opts_.memoize) {
      key = make_key(comp);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }

    // Condition on the earliest variable of the component in the elimination
    // order; its parents are all assigned by construction.
    uint32_t x = comp[0];
    for (uint32_t v : comp)
      if (rank_[v] < rank_[x]) x = v;

    Assignment ctx(bn_.num_vars(), 0);
    for (uint32_t p : bn_.parents[x]) ctx[p] = static_cast<uint32_t>(assigned_[p]);
    const size_t row = bn_.parent_row(x, ctx);

    std::vector<uint32_t> rest;
    rest.reserve(comp.size() - 1);
    for (uint32_t v : comp)
      if (v != x) rest.push_back(v);

    std::vector<uint32_t> children;
    std::vector<double> weights;
    for (uint32_t val = 0; val < bn_.cardinality(x); ++val) {
      assigned_[x] = static_cast<int32_t>(val);
      std::vector<uint32_t> parts;
      if (!rest.empty())
        for (const auto& sub : components(rest)) parts.push_back(build(sub));
      assigned_[x] = -1;

      uint32_t child;
      const uint32_t ind = indicator(x, val);
      if (parts.empty()) {
        child = ind;
      } else {
        std::vector<uint32_t> prod_children{ind};
        prod_children.insert(prod_children.end(), parts.begin(), parts.end());
        child = add_node(Node::make_product(std::move(prod_children)));
      }
      children.push_back(child);
      weights.push_back(bn_.cpt_entry(x, row, val));
    }
    // Re-assign x around the recursive calls above; the indicator/product
    // creation order keeps children ahead of the sum node.
    const uint32_t id = add_node(Node::make_sum(std::move(children), std::move(weights)));
    if (opts_.memoize) memo_.emplace(std::move(key), id);
    return id;
  }

  const BayesNet& bn_;
  const CompileOptions& opts_;
  std::vector<uint32_t> rank_;
  std::vector<int32_t> assigned_;
  std::vector<Node> nodes_;
  std::map<std::pair<uint32_t, uint32_t>, uint32_t> indicators_;
  std::map<Key, uint32_t> memo_;
};

}  // namespace

Circuit compile(const BayesNet& bn, const CompileOptions& opts) {
  bn.validate();

  std::vector<uint32_t> order;
  if (!opts.order.empty()) {
    if (opts.order.size() != bn.num_vars())
      throw ValidationError("elimination order must list every variable once");
    std::vector<bool> seen(bn.num_vars(), false);
    std::vector<uint32_t> pos(bn.num_vars(), 0);
    for (uint32_t i = 0; i < opts.order.size(); ++i) {
      uint32_t v = opts.order[i];
      if (v >= bn.num_vars() || seen[v])
        throw ValidationError("elimination order is not a permutation");
      seen[v] = true;
      pos[v] = i;
    }
    for (uint32_t v = 0; v < bn.num_vars(); ++v)
      for (uint32_t p : bn.parents[v])
        if (pos[p] > pos[v])
          throw ValidationError("elimination order is not topological: '" +
                                bn.variables[p].name + "' follows its child '" +
                                bn.variables[v].name + "'");
    order = opts.order;
  } else {
    bool identity_ok = true;
    for (uint32_t v = 0; v < bn.num_vars() && identity_ok; ++v)
      for (uint32_t p : bn.parents[v]) identity_ok &= p < v;
    if (identity_ok) {
      order.resize(bn.num_vars());
      for (uint32_t v = 0; v < bn.num_vars(); ++v) order[v] = v;
    } else {
      order = topological_order(bn);
    }
  }

  Compiler compiler(bn, order, opts);
  return compiler.run();
}

}  // namespace pcroot
