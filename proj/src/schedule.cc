#include "anomaly_lens/schedule.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

namespace anomaly_lens {

namespace {

bool is_var_start(char c) { return c >= 'a' && c <= 'z'; }
bool is_var_char(char c) { return is_var_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool valid_var_name(std::string_view name) {
  if (name.empty() || !is_var_start(name.front())) return false;
  if (is_digit(name.back())) return false;  // trailing digits are read back as the version
  return std::all_of(name.begin(), name.end(), is_var_char);
}

struct RawOp {
  Op op;
  bool has_version = false;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool done() const { return pos_ >= text_.size(); }

  RawOp item() {
    RawOp raw;
    raw.offset = pos_;
    char head = text_[pos_];
    switch (head) {
      case 'R': raw.op.kind = OpKind::kRead; break;
      case 'W': raw.op.kind = OpKind::kWrite; break;
      case 'C': raw.op.kind = OpKind::kCommit; break;
      case 'A': raw.op.kind = OpKind::kAbort; break;
      default: fail(pos_, "expected one of R, W, C, A");
    }
    ++pos_;
    raw.op.txn = txn_id();
    if (!raw.op.is_data()) return raw;

    expect('[');
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_var_start(text_[pos_])) fail(pos_, "expected variable name");
    while (pos_ < text_.size() && is_var_char(text_[pos_])) ++pos_;
    std::string_view word = text_.substr(start, pos_ - start);
    // The trailing digit run, if any, is the version.
    std::size_t split = word.size();
    while (split > 0 && is_digit(word[split - 1])) --split;
    raw.op.var = std::string(word.substr(0, split));
    if (split < word.size()) {
      raw.has_version = true;
      raw.op.version = to_number(word.substr(split), start + split);
    }
    if (!valid_var_name(raw.op.var)) fail(start, "invalid variable name");
    expect(']');
    return raw;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& what) const {
    std::size_t end = at;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) && end - at < 16) ++end;
    std::string token(text_.substr(at, end - at));
    if (token.empty()) token = "<end of input>";
    throw ParseError(at, token, what);
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint32_t to_number(std::string_view digits, std::size_t at) const {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) fail(at, "number out of range");
    return value;
  }

  TxnId txn_id() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (start == pos_) fail(start, "expected transaction number");
    return to_number(text_.substr(start, pos_ - start), start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(TxnStatus status) {
  switch (status) {
    case TxnStatus::kCommitted: return "Committed";
    case TxnStatus::kAborted: return "Aborted";
    case TxnStatus::kUndone: return "Undone";
  }
  return "?";
}

std::string format(const Op& op) {
  std::string out;
  switch (op.kind) {
    case OpKind::kRead: out = "R"; break;
    case OpKind::kWrite: out = "W"; break;
    case OpKind::kCommit: return "C" + std::to_string(op.txn);
    case OpKind::kAbort: return "A" + std::to_string(op.txn);
  }
  out += std::to_string(op.txn);
  out += '[';
  out += op.var;
  out += std::to_string(op.version);
  out += ']';
  return out;
}

ParseError::ParseError(std::size_t offset, std::string token, const std::string& what)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) + " near '" + token + "': " + what),
      offset_(offset),
      token_(std::move(token)) {}

ScheduleError::ScheduleError(std::size_t op_index, const std::string& what)
    : std::runtime_error("invalid schedule at op " + std::to_string(op_index) + ": " + what), op_index_(op_index) {}

Schedule Schedule::from_ops(std::vector<Op> ops, VersionMode mode) {
  Schedule s;
  // Newest written version per variable; nullopt until the first write.
  std::map<std::string, std::optional<Version>, std::less<>> newest;
  std::map<std::string, std::set<Version>, std::less<>> written;

  for (std::size_t i = 0; i < ops.size(); ++i) {
    Op& op = ops[i];
    op.pos = i;
    if (op.txn == 0) throw ScheduleError(i, "transaction ids start at 1");
    if (s.terminal_.contains(op.txn)) {
      throw ScheduleError(i, "T" + std::to_string(op.txn) + " already terminated at op " +
                                 std::to_string(s.terminal_.at(op.txn)));
    }
    s.txns_.insert(op.txn);

    if (op.is_terminal()) {
      if (!op.var.empty()) throw ScheduleError(i, "commit/abort carries no variable");
      op.version = 0;
      s.terminal_.emplace(op.txn, i);
      continue;
    }

    if (!valid_var_name(op.var)) throw ScheduleError(i, "invalid variable name '" + op.var + "'");
    s.vars_.insert(op.var);
    auto& last = newest[op.var];
    if (op.is_write()) {
      if (mode == VersionMode::kStrict) {
        Version expected = last ? *last + 1 : 1;
        if (op.version != expected) {
          throw ScheduleError(i, format(op) + ": expected version " + std::to_string(expected));
        }
      } else if (last && op.version <= *last) {
        throw ScheduleError(i, format(op) + ": write versions must increase");
      }
      last = op.version;
      if (mode == VersionMode::kLax) written[op.var].insert(op.version);
    } else if (op.version != 0) {
      // Strict versions are dense, so every version up to the newest exists.
      bool exists = false;
      if (mode == VersionMode::kStrict) {
        exists = last && op.version <= *last;
      } else if (auto it = written.find(op.var); it != written.end()) {
        exists = it->second.contains(op.version);
      }
      if (!exists) throw ScheduleError(i, format(op) + ": reads a version that was never written");
    }
  }
  s.ops_ = std::move(ops);
  return s;
}

TxnStatus Schedule::status(TxnId txn) const {
  auto it = terminal_.find(txn);
  if (it == terminal_.end()) return TxnStatus::kUndone;
  return ops_[it->second].kind == OpKind::kCommit ? TxnStatus::kCommitted : TxnStatus::kAborted;
}

std::optional<std::size_t> Schedule::terminal_pos(TxnId txn) const {
  auto it = terminal_.find(txn);
  if (it == terminal_.end()) return std::nullopt;
  return it->second;
}

std::map<TxnId, TxnStatus> Schedule::statuses() const {
  std::map<TxnId, TxnStatus> out;
  for (TxnId t : txns_) out.emplace(t, status(t));
  return out;
}

Schedule parse(std::string_view text, ParseOptions options) {
  Lexer lexer(text);
  std::vector<RawOp> raw;
  lexer.skip_ws();
  while (!lexer.done()) {
    raw.push_back(lexer.item());
    lexer.skip_ws();
  }

  // Version inference.
  std::map<std::string, Version, std::less<>> newest;
  std::vector<Op> ops;
  ops.reserve(raw.size());
  for (auto& r : raw) {
    Op& op = r.op;
    if (op.is_data()) {
      auto it = newest.find(op.var);
      if (!r.has_version) {
        if (op.is_write()) {
          op.version = it == newest.end() ? 1 : it->second + 1;
        } else {
          op.version = it == newest.end() ? 0 : it->second;
        }
      }
      if (op.is_write()) {
        if (it == newest.end()) {
          newest.emplace(op.var, op.version);
        } else {
          it->second = std::max(it->second, op.version);
        }
      }
    }
    ops.push_back(std::move(op));
  }
  return Schedule::from_ops(std::move(ops), options.versions);
}

std::vector<Schedule> parse_file(std::string_view text, ParseOptions options) {
  std::vector<Schedule> out;
  std::string block;
  bool has_content = false;
  auto flush = [&] {
    if (has_content) out.push_back(parse(block, options));
    block.clear();
    has_content = false;
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    std::string_view code = line.substr(0, line.find('#'));
    bool blank_code = std::all_of(code.begin(), code.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    bool comment_line = code.size() != line.size();
    if (blank_code && !comment_line) {
      flush();
    } else {
      block.append(line);
      block.push_back('\n');
      has_content = has_content || !blank_code;
    }
    start = end + 1;
  }
  flush();
  return out;
}

std::string format(const Schedule& schedule) {
  std::string out;
  for (const Op& op : schedule.ops()) out += format(op);
  return out;
}

std::vector<const Op*> ops_of(const Schedule& schedule, TxnId txn) {
  std::vector<const Op*> out;
  for (const Op& op : schedule.ops()) {
    if (op.txn == txn) out.push_back(&op);
  }
  return out;
}

}  // namespace anomaly_lens
