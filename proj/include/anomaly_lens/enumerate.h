#pragma once

// Exhaustive catalogs of two-transaction cycles and the brute-force schedule
// generator used as an oracle throughout the tests.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly_lens/classify.h"
#include "anomaly_lens/pops.h"
#include "anomaly_lens/schedule.h"

namespace anomaly_lens {

// One combination (p_ij, p_ji). A standalone self-cycle POP has no p_ji.
struct CatalogEntry {
  PopKind pij = PopKind::kWW;
  std::optional<PopKind> pji;
  int form = 0;
  std::string name;
  AnomalyClass cls = AnomalyClass::kIAT;  // class of the kinds, not of the name
  std::string signature;                  // op letters, e.g. "RWCW"
  std::string note;                       // set when the pair is not derived by signature
};

struct Catalog {
  Subclass subclass = Subclass::kSDA;
  std::vector<CatalogEntry> entries;

  std::set<int> forms() const;
  const CatalogEntry* find(PopKind pij, std::optional<PopKind> pji) const;
};

// Single variable: the three standalone self-cycle POPs, every pair containing
// one, and every (p_ij, p_ji) over {WW, WR, RW} x {WW, WR, RW, WCR, WCW, RCW}.
// p_ij is never a committed kind since t_i acts again after t_j's op.
Catalog enumerate_sda();

// Two variables, p_ij on x and p_ji on y.
Catalog enumerate_dda();

// Op-letter signature of a numbered form's formal expression: the sequence of
// R/W/C letters, e.g. "WWCR" for Lost Self Update Committed.
std::string form_signature(int form);

// Human-readable table (one line per entry) and JSON.
std::string catalog_table(const Catalog& c);
std::string catalog_json(const Catalog& c);

// Kind produced by a POP pattern such as "W_iW_jC_j" or "R_jW_iA_j": the
// pattern is played as a tiny schedule and the single POP between its two
// transactions is read back. nullopt when the pattern is inert.
std::optional<PopKind> fold_pattern(std::string_view pattern);

inline constexpr std::uint64_t kDefaultCeiling = 2'000'000'000ULL;

struct EnumSpec {
  std::size_t num_txns = 2;
  std::size_t num_vars = 1;
  std::size_t max_data_ops_per_txn = 2;
  bool include_terminals = true;
  bool lax_versions = false;
  std::uint64_t ceiling = kDefaultCeiling;
};

class CeilingExceeded : public std::runtime_error {
 public:
  explicit CeilingExceeded(std::uint64_t bound);
  std::uint64_t bound() const { return bound_; }

 private:
  std::uint64_t bound_;
};

// Upper bound on the number of schedules visited (before canonical
// filtering), saturating at UINT64_MAX.
std::uint64_t search_space_bound(const EnumSpec& spec);

// Reads ANOMALY_LENS_CEILING, falling back to kDefaultCeiling.
std::uint64_t ceiling_from_env();

// Every valid schedule of exactly spec.num_txns transactions, each with 1 to
// max_data_ops_per_txn reads/writes over at most num_vars variables, and
// (optionally) a commit, an abort, or no terminal. Transactions are numbered
// by first appearance and variables named x, y, z, ... by first appearance,
// so isomorphic schedules are visited once. Order is deterministic. Work is
// split across shards by program tuple. Throws CeilingExceeded.
void for_each_schedule(const EnumSpec& spec, const std::function<void(const Schedule&)>& visit,
                       std::size_t shard = 0, std::size_t num_shards = 1);

std::vector<Schedule> gen_schedules(const EnumSpec& spec);

// Canonical variable name for index k: x, y, z, u, v, w, a, b, ...
std::string var_name(std::size_t k);

}  // namespace anomaly_lens
