#pragma once

// Partial order pair graphs, their cycles, and DOT rendering.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "anomaly_lens/pops.h"
#include "anomaly_lens/schedule.h"

namespace anomaly_lens {

// Vertices are transactions; edges are POPs, parallel edges allowed. A
// self-cycle POP (WWC, WWA, WRA) also contributes an implicit to->from edge,
// so that on its own it closes a two-transaction cycle.
class PopGraph {
 public:
  PopGraph() = default;

  const std::set<TxnId>& vertices() const { return vertices_; }
  // Forward edges only, in edge_less order.
  const std::vector<PopEdge>& edges() const { return edges_; }
  // Forward edges plus the implicit back edges of self-cycle POPs.
  const std::vector<PopEdge>& all_edges() const { return all_edges_; }
  // Indices into all_edges() of the edges leaving `v`.
  const std::vector<std::size_t>& out_edges(TxnId v) const;

 private:
  friend PopGraph build_pg(std::vector<PopEdge> pops, const std::set<TxnId>& txns);

  std::set<TxnId> vertices_;
  std::vector<PopEdge> edges_;
  std::vector<PopEdge> all_edges_;
  std::map<TxnId, std::vector<std::size_t>> adjacency_;
};

PopGraph build_pg(std::vector<PopEdge> pops, const std::set<TxnId>& txns);

// Convenience: pops() followed by build_pg().
PopGraph build_pg(const Schedule& s, PopOptions options = {});

// A directed simple cycle. edges[k].to == edges[k+1].from, and the last edge
// returns to edges[0].from, which is the smallest transaction on the cycle.
struct Cycle {
  std::vector<PopEdge> edges;

  std::size_t num_vars() const;   // N_D
  std::size_t num_txns() const;   // N_T
  std::size_t max_anchor() const;
  std::vector<TxnId> txns() const;  // in cycle order
  std::set<std::string> vars() const;
  std::string label() const;  // "(R1W2[x]), (W2R3[x]), (W3R1[z])"

  friend bool operator==(const Cycle&, const Cycle&) = default;
};

struct CycleSearch {
  std::vector<Cycle> cycles;
  bool truncated = false;
};

inline constexpr std::size_t kDefaultCycleLimit = 10'000;

// Enumerates simple cycles (each vertex at most once), stopping after `limit`.
CycleSearch find_cycles(const PopGraph& g, std::size_t limit = kDefaultCycleLimit);

// Fewest edges, then fewest variables, then earliest completion (smallest max
// anchor), then lexicographic on (txns, vars, kinds, anchors). Independent of
// the order of `cycles`.
std::optional<Cycle> canonical_cycle(const std::vector<Cycle>& cycles);

// Strict weak order used by canonical_cycle.
bool cycle_precedes(const Cycle& a, const Cycle& b);

// Reduces a single-variable cycle over three or more transactions to a
// two-transaction cycle that exists in s's graph. Follows the chord argument:
// for consecutive t_a -> t_b -> t_c either t_b -> t_a closes a 2-cycle or
// t_a -> t_c shortcuts t_b. Throws std::invalid_argument on a bad precondition
// and std::logic_error if no 2-cycle exists.
Cycle reduce_single_var_cycle(const Cycle& c, const Schedule& s, PopOptions options = {});
Cycle reduce_single_var_cycle(const Cycle& c, const PopGraph& g);

// Same ops (as a multiset) and the same POPs on (from, to, var, kind).
bool pg_equivalent(const Schedule& a, const Schedule& b, PopOptions options = {});

// Transaction pairs of the conflict graph with status: one (from, to) per
// element of conf_ac(s), inert categories included, deduplicated.
std::vector<std::pair<TxnId, TxnId>> status_conflict_graph(const Schedule& s);

// Graphviz digraph, nodes "t<id>", edge labels "KIND[var]". Edges of
// `highlight` get color=red.
std::string to_dot(const PopGraph& g, const std::optional<Cycle>& highlight = std::nullopt);

}  // namespace anomaly_lens
