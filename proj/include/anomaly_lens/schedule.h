#pragma once

// Operations, schedules and the textual schedule notation.
//
// A schedule is written the way the operations are usually typeset:
//
//   R1[x0] W2[x1] C2 R1[x1]
//
// Whitespace between items is ignored, `#` starts a comment that runs to the
// end of the line. Versions may be omitted, in which case they are inferred
// while parsing (a write gets the next version of its variable, a read binds
// to the newest version written so far).

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anomaly_lens {

using TxnId = std::uint32_t;
using Version = std::uint32_t;

enum class OpKind : std::uint8_t { kRead, kWrite, kCommit, kAbort };

enum class TxnStatus : std::uint8_t { kCommitted, kAborted, kUndone };

std::string_view to_string(TxnStatus status);

struct Op {
  OpKind kind = OpKind::kRead;
  TxnId txn = 0;
  std::string var;      // empty for commit/abort
  Version version = 0;  // meaningless for commit/abort
  std::size_t pos = 0;

  bool is_data() const { return kind == OpKind::kRead || kind == OpKind::kWrite; }
  bool is_terminal() const { return !is_data(); }
  bool is_write() const { return kind == OpKind::kWrite; }
  bool is_read() const { return kind == OpKind::kRead; }

  friend bool operator==(const Op&, const Op&) = default;
};

// Renders one op in canonical notation, e.g. "R1[x0]" or "C2".
std::string format(const Op& op);

// Syntax error in schedule text. offset() is a byte offset into the text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string token, const std::string& what);
  std::size_t offset() const { return offset_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t offset_;
  std::string token_;
};

// A well-formed op sequence that breaks a schedule invariant. op_index() is the
// position of the offending op within the schedule.
class ScheduleError : public std::runtime_error {
 public:
  ScheduleError(std::size_t op_index, const std::string& what);
  std::size_t op_index() const { return op_index_; }

 private:
  std::size_t op_index_;
};

enum class VersionMode : std::uint8_t {
  kStrict,  // every write is exactly one past the newest version of its variable
  kLax,     // writes only need strictly increasing versions
};

class Schedule {
 public:
  Schedule() = default;

  // Validates the ops and assigns positions. Throws ScheduleError.
  static Schedule from_ops(std::vector<Op> ops, VersionMode mode = VersionMode::kStrict);

  const std::vector<Op>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }
  const Op& operator[](std::size_t i) const { return ops_[i]; }

  // T(s) and D(s).
  const std::set<TxnId>& txns() const { return txns_; }
  const std::set<std::string>& vars() const { return vars_; }

  TxnStatus status(TxnId txn) const;
  // Position of the commit/abort of `txn`, if it has one.
  std::optional<std::size_t> terminal_pos(TxnId txn) const;
  std::map<TxnId, TxnStatus> statuses() const;

  friend bool operator==(const Schedule& a, const Schedule& b) { return a.ops_ == b.ops_; }

 private:
  std::vector<Op> ops_;
  std::set<TxnId> txns_;
  std::set<std::string> vars_;
  std::map<TxnId, std::size_t> terminal_;
};

struct ParseOptions {
  VersionMode versions = VersionMode::kStrict;
};

// Parses a single schedule. Throws ParseError or ScheduleError.
Schedule parse(std::string_view text, ParseOptions options = {});

// Splits a file into schedules separated by blank lines (comment-only lines do
// not separate) and parses each one.
std::vector<Schedule> parse_file(std::string_view text, ParseOptions options = {});

// Canonical text with explicit versions and no whitespace.
std::string format(const Schedule& schedule);

// Ops of one transaction, in schedule order.
std::vector<const Op*> ops_of(const Schedule& schedule, TxnId txn);

}  // namespace anomaly_lens
