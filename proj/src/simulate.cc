#include "anomaly_lens/simulate.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "anomaly_lens/enumerate.h"
#include "anomaly_lens/graph.h"

namespace anomaly_lens {

namespace {

struct Planned {
  OpKind kind;
  std::size_t var = 0;
};

enum class State : std::uint8_t { kActive, kCommitted, kAborted };

struct Txn {
  TxnId id = 0;
  std::vector<Planned> plan;
  std::size_t next = 0;
  State state = State::kActive;
  std::optional<std::size_t> start;  // step of the first admitted op
  std::optional<TxnId> waits_for;
};

std::vector<Txn> make_workload(const Workload& w, std::mt19937_64& rng) {
  if (w.num_txns == 0 || w.num_vars == 0 || w.min_ops == 0 || w.min_ops > w.max_ops) {
    throw std::invalid_argument("bad workload");
  }
  std::vector<double> weights;
  for (std::size_t k = 0; k < w.num_vars; ++k) weights.push_back(1.0 / std::pow(static_cast<double>(k + 1), w.zipf_s));
  std::discrete_distribution<std::size_t> pick_var(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> pick_len(w.min_ops, w.max_ops);
  std::bernoulli_distribution is_write(w.write_ratio);
  std::bernoulli_distribution aborts(w.abort_ratio);

  std::vector<Txn> txns(w.num_txns);
  for (std::size_t t = 0; t < w.num_txns; ++t) {
    txns[t].id = static_cast<TxnId>(t + 1);
    std::size_t len = pick_len(rng);
    for (std::size_t k = 0; k < len; ++k) {
      OpKind kind = is_write(rng) ? OpKind::kWrite : OpKind::kRead;
      txns[t].plan.push_back({kind, pick_var(rng)});
    }
    txns[t].plan.push_back({aborts(rng) ? OpKind::kAbort : OpKind::kCommit, 0});
  }
  return txns;
}

// Keeps the ops of `keep`, renumbers writes per variable and moves each read
// to the newest kept version not newer than the one it saw.
Schedule project(const std::vector<Op>& run, const std::set<TxnId>& keep) {
  std::map<std::string, std::vector<Version>> kept;  // old versions, ascending
  for (const Op& op : run) {
    if (op.is_write() && keep.contains(op.txn)) kept[op.var].push_back(op.version);
  }
  std::vector<Op> out;
  for (const Op& op : run) {
    if (!keep.contains(op.txn)) continue;
    Op copy = op;
    if (op.is_data()) {
      const auto& vs = kept[op.var];
      auto it = std::upper_bound(vs.begin(), vs.end(), op.version);
      copy.version = static_cast<Version>(it - vs.begin());
    }
    out.push_back(std::move(copy));
  }
  return Schedule::from_ops(std::move(out));
}

std::string planned_text(TxnId t, const Planned& p) {
  switch (p.kind) {
    case OpKind::kRead: return "R" + std::to_string(t) + "[" + var_name(p.var) + "]";
    case OpKind::kWrite: return "W" + std::to_string(t) + "[" + var_name(p.var) + "]";
    case OpKind::kCommit: return "C" + std::to_string(t);
    case OpKind::kAbort: return "A" + std::to_string(t);
  }
  return "?";
}

class Simulator {
 public:
  explicit Simulator(const SchedulerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    txns_ = make_workload(cfg.workload, rng_);
    newest_.assign(cfg.workload.num_vars, 0);
  }

  RunResult run() {
    while (true) {
      std::vector<std::size_t> runnable;
      for (std::size_t k = 0; k < txns_.size(); ++k) {
        if (txns_[k].state == State::kActive && !txns_[k].waits_for) runnable.push_back(k);
      }
      if (runnable.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, runnable.size() - 1);
      attempt(txns_[runnable[pick(rng_)]]);
    }
    std::set<TxnId> committed;
    for (const Txn& t : txns_) {
      if (t.state == State::kCommitted) committed.insert(t.id);
    }
    result_.history = project(result_.run, committed);
    return std::move(result_);
  }

 private:
  bool has(Strategy s) const { return cfg_.strategies.contains(s); }
  Txn& txn(TxnId id) { return txns_[id - 1]; }

  void log(const Txn& t, std::string op, Decision d, std::string reason) {
    result_.log.push_back({step_, t.id, std::move(op), d, std::move(reason)});
  }

  // Another active transaction holding an uncommitted write on `var`.
  std::optional<TxnId> uncommitted_writer(TxnId self, const std::string& var) const {
    for (const Op& op : result_.run) {
      if (op.is_write() && op.var == var && op.txn != self && txns_[op.txn - 1].state == State::kActive) {
        return op.txn;
      }
    }
    return std::nullopt;
  }

  Version read_version(const Txn& t, const std::string& var) const {
    Version own = 0;
    bool wrote = false;
    for (const Op& op : result_.run) {
      if (op.is_write() && op.var == var && op.txn == t.id) {
        own = op.version;
        wrote = true;
      }
    }
    if (wrote) return own;
    Version v = 0;
    for (std::size_t k = 0; k < result_.run.size(); ++k) {
      const Op& op = result_.run[k];
      if (!op.is_write() || op.var != var) continue;
      const Txn& w = txns_[op.txn - 1];
      if (has(Strategy::kSnapshot)) {
        auto c = commit_step_.find(w.id);
        std::size_t snap = t.start.value_or(step_);
        if (c != commit_step_.end() && c->second < snap) v = std::max(v, op.version);
      } else if (w.state != State::kAborted) {
        v = std::max(v, op.version);
      }
    }
    return v;
  }

  bool closes_cycle(const Op& op) const {
    std::vector<Op> tentative = result_.run;
    tentative.push_back(op);
    std::set<TxnId> keep;
    for (const Txn& t : txns_) {
      if (t.state != State::kAborted) keep.insert(t.id);
    }
    Schedule s = project(tentative, keep);
    return !find_cycles(build_pg(s), 1).cycles.empty();
  }

  void attempt(Txn& t) {
    ++step_;
    const Planned& p = t.plan[t.next];
    std::string text = planned_text(t.id, p);
    Op op;
    op.kind = p.kind;
    op.txn = t.id;

    if (p.kind == OpKind::kRead || p.kind == OpKind::kWrite) {
      op.var = var_name(p.var);
      std::optional<TxnId> blocker;
      if (p.kind == OpKind::kWrite && has(Strategy::kBlockWW)) blocker = uncommitted_writer(t.id, op.var);
      if (p.kind == OpKind::kRead && has(Strategy::kReadCommitted)) blocker = uncommitted_writer(t.id, op.var);
      if (blocker) {
        block(t, *blocker, text);
        return;
      }
      op.version = p.kind == OpKind::kWrite ? newest_[p.var] + 1 : read_version(t, op.var);
    }

    if (p.kind != OpKind::kAbort && has(Strategy::kFullCycleCheck) && closes_cycle(op)) {
      log(t, text, Decision::kAborted, "would close a cycle");
      abort(t);
      return;
    }

    if (p.kind == OpKind::kWrite) newest_[p.var] = op.version;
    if (!t.start) t.start = step_;
    log(t, format(op), Decision::kAdmitted, "");
    ++result_.counters.admitted;
    result_.run.push_back(std::move(op));
    ++t.next;
    if (p.kind == OpKind::kCommit) {
      t.state = State::kCommitted;
      commit_step_[t.id] = step_;
      release(t.id);
    } else if (p.kind == OpKind::kAbort) {
      t.state = State::kAborted;
      ++result_.counters.aborted;
      release(t.id);
    }
  }

  void block(Txn& t, TxnId blocker, const std::string& text) {
    log(t, text, Decision::kBlocked, "waits for T" + std::to_string(blocker));
    ++result_.counters.blocked;
    t.waits_for = blocker;
    waiters_.push_back(t.id);

    std::vector<TxnId> ring{t.id};
    for (std::optional<TxnId> cur = blocker; cur; cur = txn(*cur).waits_for) {
      if (*cur == t.id) {
        ++result_.counters.deadlocks;
        auto younger = [&](TxnId a, TxnId b) {
          auto sa = txn(a).start.value_or(SIZE_MAX), sb = txn(b).start.value_or(SIZE_MAX);
          return std::tie(sa, a) < std::tie(sb, b);
        };
        Txn& victim = txn(*std::max_element(ring.begin(), ring.end(), younger));
        log(victim, "A" + std::to_string(victim.id), Decision::kAborted, "deadlock victim");
        abort(victim);
        return;
      }
      if (std::find(ring.begin(), ring.end(), *cur) != ring.end()) return;
      ring.push_back(*cur);
    }
  }

  void abort(Txn& t) {
    Op a;
    a.kind = OpKind::kAbort;
    a.txn = t.id;
    result_.run.push_back(a);
    t.state = State::kAborted;
    t.waits_for.reset();
    std::erase(waiters_, t.id);
    ++result_.counters.aborted;
    release(t.id);
  }

  void release(TxnId done) {
    std::vector<TxnId> ready;
    for (TxnId w : waiters_) {
      if (txn(w).waits_for == done) ready.push_back(w);
    }
    for (TxnId w : ready) {
      std::erase(waiters_, w);
      txn(w).waits_for.reset();
    }
    for (TxnId w : ready) {
      if (txn(w).state == State::kActive && !txn(w).waits_for) attempt(txn(w));
    }
  }

  const SchedulerConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<Txn> txns_;
  std::vector<Version> newest_;
  std::deque<TxnId> waiters_;
  std::map<TxnId, std::size_t> commit_step_;
  std::size_t step_ = 0;
  RunResult result_;
};

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kBlockWW: return "block-ww";
    case Strategy::kReadCommitted: return "read-committed";
    case Strategy::kSnapshot: return "snapshot";
    case Strategy::kFullCycleCheck: return "full-cycle-check";
  }
  return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view text) {
  for (Strategy s : {Strategy::kBlockWW, Strategy::kReadCommitted, Strategy::kSnapshot, Strategy::kFullCycleCheck}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::set<Strategy> parse_strategies(std::string_view csv) {
  std::set<Strategy> out;
  if (csv.empty() || csv == "none") return out;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    std::size_t end = csv.find(',', begin);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view name = csv.substr(begin, end - begin);
    auto s = strategy_from_string(name);
    if (!s) throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
    out.insert(*s);
    begin = end + 1;
  }
  return out;
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kAdmitted: return "admitted";
    case Decision::kBlocked: return "blocked";
    case Decision::kAborted: return "aborted";
  }
  return "?";
}

RunResult simulate(const SchedulerConfig& cfg) { return Simulator(cfg).run(); }

std::string to_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["history"] = format(r.history);
  std::string run;
  for (const Op& op : r.run) run += format(op);
  j["run"] = run;
  j["decisions"] = nlohmann::ordered_json::array();
  for (const DecisionRecord& d : r.log) {
    nlohmann::ordered_json row;
    row["step"] = d.step;
    row["txn"] = d.txn;
    row["op"] = d.op;
    row["decision"] = std::string(to_string(d.decision));
    if (!d.reason.empty()) row["reason"] = d.reason;
    j["decisions"].push_back(std::move(row));
  }
  j["counters"] = {{"admitted", r.counters.admitted},
                   {"blocked", r.counters.blocked},
                   {"aborted", r.counters.aborted},
                   {"deadlocks", r.counters.deadlocks}};
  return j.dump(2) + "\n";
}

}  // namespace anomaly_lens
