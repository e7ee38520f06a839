#pragma once

// Brute-force reference implementations used only by the tests. They work
// from the op list directly and share no code with the library beyond the
// Schedule container.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "anomaly_lens/schedule.h"

namespace oracle {

using anomaly_lens::Op;
using anomaly_lens::OpKind;
using anomaly_lens::Schedule;
using anomaly_lens::TxnId;

inline char letter(const Op& op) {
  switch (op.kind) {
    case OpKind::kRead: return 'R';
    case OpKind::kWrite: return 'W';
    case OpKind::kCommit: return 'C';
    case OpKind::kAbort: return 'A';
  }
  return '?';
}

inline bool conflicting(const Op& p, const Op& q) {
  return p.is_data() && q.is_data() && p.txn != q.txn && p.var == q.var && (p.is_write() || q.is_write());
}

// conf(s) as "W1W2[x]" labels.
inline std::set<std::string> conflict_labels(const Schedule& s) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (!conflicting(s[i], s[j])) continue;
      out.insert(std::string(1, letter(s[i])) + std::to_string(s[i].txn) + letter(s[j]) + std::to_string(s[j].txn) +
                 "[" + s[i].var + "]");
    }
  }
  return out;
}

struct Terminal {
  std::size_t pos;
  char kind;
};

inline std::optional<Terminal> terminal_of(const Schedule& s, TxnId t) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].txn == t && s[k].is_terminal()) return Terminal{k, letter(s[k])};
  }
  return std::nullopt;
}

// The POP kind of the conflict (s[p], s[q]), p before q, as a string such as
// "WCR" or "WWA"; nullopt when the conflict forms no POP. `ta` and `tb` are the
// terminals of s[p]'s and s[q]'s transactions.
inline std::optional<std::string> pop_kind(const Schedule& s, std::size_t p, std::size_t q,
                                           std::optional<Terminal> ta, std::optional<Terminal> tb) {
  std::string base{letter(s[p]), letter(s[q])};
  if (ta && ta->pos < q) {
    if (ta->kind == 'A') return std::nullopt;
    return std::string{base[0], 'C', base[1]};
  }
  bool a_first = ta && (!tb || ta->pos < tb->pos);
  bool b_first = tb && !a_first;
  if (b_first) {
    if (tb->kind == 'A') return std::nullopt;
    return base;
  }
  if (!a_first) return base;
  if (base == "RW") return base;
  if (ta->kind == 'C') return base == "WW" ? std::optional<std::string>("WWC") : base;
  return base + "A";
}

inline std::optional<std::string> pop_kind(const Schedule& s, std::size_t p, std::size_t q) {
  return pop_kind(s, p, q, terminal_of(s, s[p].txn), terminal_of(s, s[q].txn));
}

struct Edge {
  TxnId from, to;
  std::string var, kind;
};

inline std::vector<Edge> pop_edges(const Schedule& s) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (!conflicting(s[i], s[j])) continue;
      if (auto k = pop_kind(s, i, j)) out.push_back({s[i].txn, s[j].txn, s[i].var, *k});
    }
  }
  return out;
}

inline bool self_cycle(const std::string& kind) { return kind == "WWC" || kind == "WWA" || kind == "WRA"; }

// Any directed cycle over transactions, self-cycle POPs counting both ways.
inline bool has_cycle(const Schedule& s) {
  std::vector<TxnId> ids(s.txns().begin(), s.txns().end());
  std::size_t n = ids.size();
  auto index = [&](TxnId t) { return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), t) - ids.begin()); };
  std::vector<std::optional<Terminal>> term(n);
  for (std::size_t k = 0; k < n; ++k) term[k] = terminal_of(s, ids[k]);
  std::vector<char> reach(n * n, 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (!conflicting(s[i], s[j])) continue;
      std::size_t a = index(s[i].txn), b = index(s[j].txn);
      auto kind = pop_kind(s, i, j, term[a], term[b]);
      if (!kind) continue;
      reach[a * n + b] = 1;
      if (self_cycle(*kind)) reach[b * n + a] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k * n + j]) reach[i * n + j] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i * n + i]) return true;
  return false;
}

// Number of simple cycles in a multigraph given as (from, to) pairs, by
// trying every sequence of distinct vertices.
inline std::size_t count_simple_cycles(const std::vector<std::pair<TxnId, TxnId>>& edges) {
  std::map<std::pair<TxnId, TxnId>, std::size_t> mult;
  std::set<TxnId> vs;
  for (auto [a, b] : edges) {
    ++mult[{a, b}];
    vs.insert(a);
    vs.insert(b);
  }
  std::vector<TxnId> all(vs.begin(), vs.end());
  std::size_t total = 0;
  // Subsets as bitmasks; each cycle counted once from its smallest vertex.
  for (unsigned mask = 1; mask < (1u << all.size()); ++mask) {
    std::vector<TxnId> sub;
    for (std::size_t k = 0; k < all.size(); ++k)
      if (mask & (1u << k)) sub.push_back(all[k]);
    if (sub.size() < 2) continue;
    std::vector<TxnId> rest(sub.begin() + 1, sub.end());
    do {
      std::size_t ways = 1;
      TxnId prev = sub[0];
      for (TxnId v : rest) {
        auto it = mult.find({prev, v});
        ways *= it == mult.end() ? 0 : it->second;
        prev = v;
      }
      auto back = mult.find({prev, sub[0]});
      ways *= back == mult.end() ? 0 : back->second;
      total += ways;
    } while (std::next_permutation(rest.begin(), rest.end()));
  }
  return total;
}

}  // namespace oracle
