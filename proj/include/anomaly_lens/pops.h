#pragma once

// Conflicts, conflicts with transaction status, and partial order pairs.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly_lens/schedule.h"

namespace anomaly_lens {

// Operation shapes of a conflicting pair (earlier op first).
enum class Shape : std::uint8_t { kRW, kWR, kWW };

std::string_view to_string(Shape shape);

struct Conflict {
  std::size_t first = 0;   // position of p
  std::size_t second = 0;  // position of q, first < second
  TxnId from = 0;          // owner of p
  TxnId to = 0;            // owner of q
  std::string var;
  Shape shape = Shape::kWW;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

// Relative order of a conflict (p_i, q_j) and the two transactions' terminal
// ops. The numbering follows the usual seven-way split:
//   1  p_i C_i q_j        2  p_i A_i q_j
//   3  p_i q_j C_i (before t_j terminates)
//   4  p_i q_j A_i (before t_j terminates)
//   5  p_i q_j C_j (before t_i terminates)
//   6  p_i q_j A_j (before t_i terminates)
//   7  neither transaction terminated
enum class StatusCategory : std::uint8_t {
  kCommittedBefore = 1,
  kAbortedBefore = 2,
  kFirstCommitsAfter = 3,
  kFirstAbortsAfter = 4,
  kSecondCommitsFirst = 5,
  kSecondAbortsFirst = 6,
  kUndone = 7,
};

struct StatusedConflict {
  Conflict conflict;
  StatusCategory category = StatusCategory::kUndone;
  std::optional<std::size_t> status_pos;  // the C/A that decided the category

  // Categories 2 and 6 never produce a partial order pair.
  bool inert() const {
    return category == StatusCategory::kAbortedBefore || category == StatusCategory::kSecondAbortsFirst;
  }
};

// The nine partial-order-pair kinds. Enumerator order is the tie-break order
// used when ranking cycles (uncommitted double writes first).
enum class PopKind : std::uint8_t {
  kWW,   // W_i W_j
  kWWC,  // W_i W_j C_i   (self cycle)
  kWWA,  // W_i W_j A_i   (self cycle)
  kWR,   // W_i R_j
  kWRA,  // W_i R_j A_i   (self cycle)
  kRW,   // R_i W_j
  kWCR,  // W_i C_i R_j
  kWCW,  // W_i C_i W_j
  kRCW,  // R_i C_i W_j
};

inline constexpr PopKind kAllPopKinds[] = {PopKind::kWW,  PopKind::kWWC, PopKind::kWWA,
                                           PopKind::kWR,  PopKind::kWRA, PopKind::kRW,
                                           PopKind::kWCR, PopKind::kWCW, PopKind::kRCW};

std::string_view to_string(PopKind kind);
std::optional<PopKind> pop_kind_from_string(std::string_view text);

constexpr bool is_self_cycle(PopKind k) { return k == PopKind::kWWC || k == PopKind::kWWA || k == PopKind::kWRA; }
constexpr bool is_committed_kind(PopKind k) { return k == PopKind::kWCR || k == PopKind::kWCW || k == PopKind::kRCW; }

struct PopEdge {
  TxnId from = 0;
  TxnId to = 0;
  std::string var;
  PopKind kind = PopKind::kWW;
  std::size_t first_pos = 0;               // p
  std::size_t second_pos = 0;              // q
  std::optional<std::size_t> status_pos;   // C_i/A_i that is part of the kind, if any
  bool implicit_back = false;              // the to->from half of a self-cycle POP

  std::size_t max_anchor() const { return status_pos ? std::max(second_pos, *status_pos) : second_pos; }
  // e.g. "W1R2A1[x]"
  std::string label() const;

  friend bool operator==(const PopEdge&, const PopEdge&) = default;
};

// Orders edges by (from, to, var, anchor positions, kind).
bool edge_less(const PopEdge& a, const PopEdge& b);

// conf(s): every ordered pair of ops from different transactions on the same
// variable with at least one write, sorted by (first, second). Versions play no
// part in pairing.
std::vector<Conflict> conflicts(const Schedule& s);

StatusCategory categorize(const Schedule& s, const Conflict& c, std::optional<std::size_t>* status_pos = nullptr);

// conf_ac(s): conflicts annotated with their status category. Inert
// categories stay in the result.
std::vector<StatusedConflict> conflicts_with_status(const Schedule& s);

// Kind for a shape under a category; nullopt for inert categories.
std::optional<PopKind> pop_kind(Shape shape, StatusCategory category);

struct PopOptions {
  // Only emit RCW when the reading transaction also writes something.
  bool strict_rcw = false;
};

// Pop(s): one edge per non-inert conflict, sorted with edge_less.
std::vector<PopEdge> pops(const Schedule& s, PopOptions options = {});

}  // namespace anomaly_lens
