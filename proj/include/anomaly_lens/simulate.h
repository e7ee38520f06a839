#pragma once

// Seeded online scheduler. Transactions from a generated workload are
// interleaved one op at a time; each op is admitted, blocked or aborted by the
// active strategies, and the committed part of the run is emitted as a
// schedule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly_lens/schedule.h"

namespace anomaly_lens {

enum class Strategy : std::uint8_t { kBlockWW, kReadCommitted, kSnapshot, kFullCycleCheck };

std::string_view to_string(Strategy s);
// "block-ww", "read-committed", "snapshot", "full-cycle-check".
std::optional<Strategy> strategy_from_string(std::string_view text);
// Comma separated list; empty text or "none" gives the empty set. Throws
// std::invalid_argument on an unknown name.
std::set<Strategy> parse_strategies(std::string_view csv);

struct Workload {
  std::size_t num_txns = 4;
  std::size_t num_vars = 3;
  std::size_t min_ops = 1;
  std::size_t max_ops = 4;
  double write_ratio = 0.5;
  double abort_ratio = 0.1;  // chance a transaction ends in A instead of C
  double zipf_s = 1.0;
};

struct SchedulerConfig {
  std::set<Strategy> strategies;
  std::uint64_t seed = 0;
  Workload workload;
};

enum class Decision : std::uint8_t { kAdmitted, kBlocked, kAborted };

std::string_view to_string(Decision d);

struct DecisionRecord {
  std::size_t step = 0;
  TxnId txn = 0;
  std::string op;  // the op as it was attempted, e.g. "W2[y]" or "C1"
  Decision decision = Decision::kAdmitted;
  std::string reason;
};

struct RunCounters {
  std::size_t admitted = 0;
  std::size_t blocked = 0;
  std::size_t aborted = 0;
  std::size_t deadlocks = 0;

  friend bool operator==(const RunCounters&, const RunCounters&) = default;
};

struct RunResult {
  Schedule history;          // committed transactions only
  std::vector<Op> run;       // every admitted op, aborted transactions included
  std::vector<DecisionRecord> log;
  RunCounters counters;
};

RunResult simulate(const SchedulerConfig& cfg);

std::string to_json(const RunResult& r);

}  // namespace anomaly_lens
