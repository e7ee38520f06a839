#include "anomaly_lens/graph.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace anomaly_lens {

namespace {

const std::vector<std::size_t> kNoEdges;

PopEdge back_edge_of(const PopEdge& e) {
  PopEdge back = e;
  std::swap(back.from, back.to);
  back.implicit_back = true;
  return back;
}

// Rotates so the smallest transaction comes first.
Cycle normalized(std::vector<PopEdge> edges) {
  auto it = std::min_element(edges.begin(), edges.end(),
                             [](const PopEdge& a, const PopEdge& b) { return a.from < b.from; });
  std::rotate(edges.begin(), it, edges.end());
  return Cycle{std::move(edges)};
}

auto anchor_key(const PopEdge& e) { return std::make_tuple(e.first_pos, e.second_pos, e.status_pos, e.implicit_back); }

}  // namespace

const std::vector<std::size_t>& PopGraph::out_edges(TxnId v) const {
  auto it = adjacency_.find(v);
  return it == adjacency_.end() ? kNoEdges : it->second;
}

PopGraph build_pg(std::vector<PopEdge> pops, const std::set<TxnId>& txns) {
  PopGraph g;
  g.vertices_ = txns;
  std::sort(pops.begin(), pops.end(), edge_less);
  g.all_edges_.reserve(pops.size() * 2);
  for (const PopEdge& e : pops) {
    g.vertices_.insert(e.from);
    g.vertices_.insert(e.to);
    g.all_edges_.push_back(e);
    if (is_self_cycle(e.kind)) g.all_edges_.push_back(back_edge_of(e));
  }
  g.edges_ = std::move(pops);
  std::sort(g.all_edges_.begin(), g.all_edges_.end(), edge_less);
  for (std::size_t i = 0; i < g.all_edges_.size(); ++i) g.adjacency_[g.all_edges_[i].from].push_back(i);
  return g;
}

PopGraph build_pg(const Schedule& s, PopOptions options) { return build_pg(pops(s, options), s.txns()); }

std::size_t Cycle::num_vars() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    bool seen = false;
    for (std::size_t m = 0; m < k && !seen; ++m) seen = edges[m].var == edges[k].var;
    n += seen ? 0 : 1;
  }
  return n;
}

std::size_t Cycle::num_txns() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    bool seen = false;
    for (std::size_t m = 0; m < k && !seen; ++m) seen = edges[m].from == edges[k].from;
    n += seen ? 0 : 1;
  }
  return n;
}

std::size_t Cycle::max_anchor() const {
  std::size_t m = 0;
  for (const PopEdge& e : edges) m = std::max(m, e.max_anchor());
  return m;
}

std::vector<TxnId> Cycle::txns() const {
  std::vector<TxnId> out;
  for (const PopEdge& e : edges) out.push_back(e.from);
  return out;
}

std::set<std::string> Cycle::vars() const {
  std::set<std::string> out;
  for (const PopEdge& e : edges) out.insert(e.var);
  return out;
}

std::string Cycle::label() const {
  std::string out;
  for (const PopEdge& e : edges) {
    if (!out.empty()) out += ", ";
    out += "(" + e.label() + ")";
  }
  return out;
}

CycleSearch find_cycles(const PopGraph& g, std::size_t limit) {
  CycleSearch result;
  const auto& all = g.all_edges();
  std::vector<PopEdge> path;
  std::vector<TxnId> on_path;
  path.reserve(g.vertices().size());
  on_path.reserve(g.vertices().size());
  auto visited = [&](TxnId v) { return std::find(on_path.begin(), on_path.end(), v) != on_path.end(); };

  // Cycles are rooted at their smallest vertex, so the search from `root`
  // only walks vertices above it.
  auto dfs = [&](auto&& self, TxnId root, TxnId v) -> void {
    for (std::size_t idx : g.out_edges(v)) {
      if (result.truncated) return;
      const PopEdge& e = all[idx];
      if (e.to == root) {
        if (result.cycles.size() >= limit) {
          result.truncated = true;
          return;
        }
        path.push_back(e);
        result.cycles.push_back(Cycle{path});
        path.pop_back();
      } else if (e.to > root && !visited(e.to)) {
        path.push_back(e);
        on_path.push_back(e.to);
        self(self, root, e.to);
        on_path.pop_back();
        path.pop_back();
      }
    }
  };

  for (TxnId root : g.vertices()) {
    on_path.assign(1, root);
    dfs(dfs, root, root);
    if (result.truncated) break;
  }
  return result;
}

bool cycle_precedes(const Cycle& a, const Cycle& b) {
  auto head = [](const Cycle& c) { return std::make_tuple(c.edges.size(), c.num_vars(), c.max_anchor()); };
  if (head(a) != head(b)) return head(a) < head(b);
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    if (a.edges[k].from != b.edges[k].from) return a.edges[k].from < b.edges[k].from;
  }
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    if (a.edges[k].var != b.edges[k].var) return a.edges[k].var < b.edges[k].var;
  }
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    if (a.edges[k].kind != b.edges[k].kind) return a.edges[k].kind < b.edges[k].kind;
  }
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    if (anchor_key(a.edges[k]) != anchor_key(b.edges[k])) return anchor_key(a.edges[k]) < anchor_key(b.edges[k]);
  }
  return false;
}

std::optional<Cycle> canonical_cycle(const std::vector<Cycle>& cycles) {
  if (cycles.empty()) return std::nullopt;
  using Head = std::tuple<std::size_t, std::size_t, std::size_t>;
  std::vector<Head> heads;
  heads.reserve(cycles.size());
  for (const Cycle& c : cycles) heads.emplace_back(c.edges.size(), c.num_vars(), c.max_anchor());
  std::size_t best = 0;
  for (std::size_t k = 1; k < cycles.size(); ++k) {
    if (heads[k] < heads[best] || (heads[k] == heads[best] && cycle_precedes(cycles[k], cycles[best]))) best = k;
  }
  return cycles[best];
}

Cycle reduce_single_var_cycle(const Cycle& c, const Schedule& s, PopOptions options) {
  return reduce_single_var_cycle(c, build_pg(s, options));
}

Cycle reduce_single_var_cycle(const Cycle& c, const PopGraph& g) {
  if (c.num_vars() != 1) throw std::invalid_argument("reduce_single_var_cycle: cycle spans more than one variable");
  if (c.num_txns() < 3) throw std::invalid_argument("reduce_single_var_cycle: cycle has fewer than three transactions");
  const std::string& var = c.edges.front().var;

  // Earliest-completing edge a -> b on `var`, if any.
  auto edge = [&](TxnId a, TxnId b) -> std::optional<PopEdge> {
    std::optional<PopEdge> best;
    for (std::size_t idx : g.out_edges(a)) {
      const PopEdge& e = g.all_edges()[idx];
      if (e.to != b || e.var != var) continue;
      if (!best || std::make_tuple(e.max_anchor(), e.kind, anchor_key(e)) <
                       std::make_tuple(best->max_anchor(), best->kind, anchor_key(*best))) {
        best = e;
      }
    }
    return best;
  };
  auto two_cycle = [&](TxnId a, TxnId b) -> std::optional<Cycle> {
    auto ab = edge(a, b);
    auto ba = edge(b, a);
    if (!ab || !ba) return std::nullopt;
    // Prefer a self-cycle POP when one edge is the implicit half of the other.
    for (std::size_t idx : g.out_edges(a)) {
      const PopEdge& e = g.all_edges()[idx];
      if (e.to == b && e.var == var && is_self_cycle(e.kind) && !e.implicit_back &&
          e.max_anchor() <= std::max(ab->max_anchor(), ba->max_anchor())) {
        return normalized({e, back_edge_of(e)});
      }
    }
    return normalized({*ab, *ba});
  };

  std::vector<TxnId> ring = c.txns();
  while (ring.size() > 2) {
    bool shortened = false;
    const std::size_t n = ring.size();
    for (std::size_t k = 0; k < n && !shortened; ++k) {
      TxnId a = ring[k], b = ring[(k + 1) % n], next = ring[(k + 2) % n];
      if (edge(b, a)) {
        if (auto found = two_cycle(a, b)) return *found;
      }
      if (edge(a, next)) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>((k + 1) % n));
        shortened = true;
      }
    }
    if (!shortened) break;
  }
  if (ring.size() == 2) {
    if (auto found = two_cycle(ring[0], ring[1])) return *found;
  }
  // The chord argument failed to apply (status ops can suppress a chord);
  // fall back to any 2-cycle among the cycle's transactions.
  std::vector<TxnId> members = c.txns();
  std::sort(members.begin(), members.end());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (auto found = two_cycle(members[i], members[j])) return *found;
    }
  }
  throw std::logic_error("reduce_single_var_cycle: no two-transaction cycle on " + var + " for " + c.label());
}

bool pg_equivalent(const Schedule& a, const Schedule& b, PopOptions options) {
  auto op_multiset = [](const Schedule& s) {
    std::vector<std::tuple<OpKind, TxnId, std::string, Version>> out;
    for (const Op& op : s.ops()) out.emplace_back(op.kind, op.txn, op.var, op.version);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto pop_set = [&](const Schedule& s) {
    std::set<std::tuple<TxnId, TxnId, std::string, PopKind>> out;
    for (const PopEdge& e : pops(s, options)) out.emplace(e.from, e.to, e.var, e.kind);
    return out;
  };
  return op_multiset(a) == op_multiset(b) && pop_set(a) == pop_set(b);
}

std::vector<std::pair<TxnId, TxnId>> status_conflict_graph(const Schedule& s) {
  std::set<std::pair<TxnId, TxnId>> edges;
  for (const StatusedConflict& sc : conflicts_with_status(s)) edges.emplace(sc.conflict.from, sc.conflict.to);
  return {edges.begin(), edges.end()};
}

std::string to_dot(const PopGraph& g, const std::optional<Cycle>& highlight) {
  auto highlighted = [&](const PopEdge& e) {
    if (!highlight) return false;
    return std::find(highlight->edges.begin(), highlight->edges.end(), e) != highlight->edges.end();
  };
  std::ostringstream out;
  out << "digraph pg {\n";
  for (TxnId v : g.vertices()) out << "  t" << v << ";\n";
  for (const PopEdge& e : g.all_edges()) {
    out << "  t" << e.from << " -> t" << e.to << " [label=\"" << to_string(e.kind) << "[" << e.var << "]\"";
    if (e.implicit_back) out << ", style=dashed";
    if (highlighted(e)) out << ", color=red, penwidth=2";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace anomaly_lens
