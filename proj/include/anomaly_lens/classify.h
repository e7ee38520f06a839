#pragma once

// Anomaly classification: WAT/RAT/IAT by the edge kinds of a cycle,
// SDA/DDA/MDA by its footprint, and a name for every two-transaction cycle.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly_lens/graph.h"
#include "anomaly_lens/pops.h"
#include "anomaly_lens/schedule.h"

namespace anomaly_lens {

enum class AnomalyClass : std::uint8_t { kWAT, kRAT, kIAT };
enum class Subclass : std::uint8_t { kSDA, kDDA, kMDA };

std::string_view to_string(AnomalyClass c);
std::string_view to_string(Subclass s);
std::optional<AnomalyClass> anomaly_class_from_string(std::string_view text);
std::optional<Subclass> subclass_from_string(std::string_view text);

// One row of the anomaly table. `number` is the form number (1)-(26); the
// three Step rows and nothing else carry 0.
struct AnomalyForm {
  int number;
  std::string_view name;
  AnomalyClass cls;
  Subclass subclass;
  // Pattern with placeholders {i}, {j}, {x}, {y}.
  std::string_view formal;
};

// All 29 rows: 26 numbered forms plus Step WAT, Step RAT, Step IAT.
std::span<const AnomalyForm> anomaly_forms();
const AnomalyForm* find_form(std::string_view name);
const AnomalyForm& form_by_number(int number);
const AnomalyForm& step_form(AnomalyClass cls);

struct AnomalyReport {
  Cycle cycle;
  AnomalyClass cls = AnomalyClass::kIAT;
  Subclass subclass = Subclass::kMDA;
  std::string name;
  int form = 0;
  std::string formal_expression;
};

// WAT if any kind is an uncommitted double write (WW, WWC, WWA); else RAT if
// any is an uncommitted write-read (WR, WRA); else IAT.
AnomalyClass class_of(std::span<const PopKind> kinds);

// (1, 2) -> SDA, (2, 2) -> DDA, anything else -> MDA.
Subclass subclass_of(std::size_t num_vars, std::size_t num_txns);

// Form number for a two-transaction cycle given the kinds of p_ij and p_ji,
// where p_ij is the edge leaving the transaction that acts first. Returns
// nullopt for combinations outside the catalog.
std::optional<int> form_for_pair(PopKind pij, PopKind pji, Subclass subclass);

// Thrown when a two-transaction cycle has no catalog entry.
class UnmatchedCycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

AnomalyReport classify_cycle(const Cycle& c);

struct ClassifyOptions {
  PopOptions pops;
  std::size_t cycle_limit = kDefaultCycleLimit;
};

struct ScheduleVerdict {
  std::vector<PopEdge> pops;
  std::vector<Cycle> cycles;
  bool truncated = false;
  std::optional<AnomalyReport> anomaly;

  bool clean() const { return !anomaly.has_value(); }
};

// pops -> build_pg -> find_cycles -> canonical_cycle -> classify_cycle.
ScheduleVerdict classify_schedule(const Schedule& s, ClassifyOptions options = {});

// The eight ways W_i ... W_j can be followed by one terminal of each
// transaction, named by which terminal comes first.
enum class WwOrdering : std::uint8_t {
  kCommitICommitJ,
  kCommitIAbortJ,
  kAbortICommitJ,
  kAbortIAbortJ,
  kCommitJCommitI,
  kCommitJAbortI,
  kAbortJCommitI,
  kAbortJAbortI,
};

inline constexpr WwOrdering kAllWwOrderings[] = {
    WwOrdering::kCommitICommitJ, WwOrdering::kCommitIAbortJ, WwOrdering::kAbortICommitJ,
    WwOrdering::kAbortIAbortJ,   WwOrdering::kCommitJCommitI, WwOrdering::kCommitJAbortI,
    WwOrdering::kAbortJCommitI,  WwOrdering::kAbortJAbortI};

// Parses "CiCj", "Ci Aj", "C_i,A_j", ... Throws std::invalid_argument.
WwOrdering parse_ww_ordering(std::string_view text);
std::string_view to_string(WwOrdering ordering);

// Whether W_i[x1] ... W_j[x2] followed by `ordering` is anomalous.
bool ww_status_outcome(WwOrdering ordering);

}  // namespace anomaly_lens
