#include "anomaly_lens/pops.h"

#include <algorithm>
#include <tuple>

namespace anomaly_lens {

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::kRW: return "RW";
    case Shape::kWR: return "WR";
    case Shape::kWW: return "WW";
  }
  return "?";
}

std::string_view to_string(PopKind kind) {
  switch (kind) {
    case PopKind::kWW: return "WW";
    case PopKind::kWWC: return "WWC";
    case PopKind::kWWA: return "WWA";
    case PopKind::kWR: return "WR";
    case PopKind::kWRA: return "WRA";
    case PopKind::kRW: return "RW";
    case PopKind::kWCR: return "WCR";
    case PopKind::kWCW: return "WCW";
    case PopKind::kRCW: return "RCW";
  }
  return "?";
}

std::optional<PopKind> pop_kind_from_string(std::string_view text) {
  for (PopKind k : kAllPopKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string PopEdge::label() const {
  std::string a = std::to_string(from);
  std::string b = std::to_string(to);
  std::string out;
  if (implicit_back) {
    // The closing half of a self cycle: R_jA_i, W_jC_i or W_jA_i.
    std::string head = kind == PopKind::kWRA ? "R" : "W";
    std::string tail = kind == PopKind::kWWC ? "C" : "A";
    return head + a + tail + b + "[" + var + "]";
  }
  switch (kind) {
    case PopKind::kWW: out = "W" + a + "W" + b; break;
    case PopKind::kWWC: out = "W" + a + "W" + b + "C" + a; break;
    case PopKind::kWWA: out = "W" + a + "W" + b + "A" + a; break;
    case PopKind::kWR: out = "W" + a + "R" + b; break;
    case PopKind::kWRA: out = "W" + a + "R" + b + "A" + a; break;
    case PopKind::kRW: out = "R" + a + "W" + b; break;
    case PopKind::kWCR: out = "W" + a + "C" + a + "R" + b; break;
    case PopKind::kWCW: out = "W" + a + "C" + a + "W" + b; break;
    case PopKind::kRCW: out = "R" + a + "C" + a + "W" + b; break;
  }
  return out + "[" + var + "]";
}

bool edge_less(const PopEdge& a, const PopEdge& b) {
  return std::tie(a.from, a.to, a.var, a.first_pos, a.second_pos, a.status_pos, a.kind, a.implicit_back) <
         std::tie(b.from, b.to, b.var, b.first_pos, b.second_pos, b.status_pos, b.kind, b.implicit_back);
}

std::vector<Conflict> conflicts(const Schedule& s) {
  std::vector<Conflict> out;
  const auto& ops = s.ops();
  out.reserve(ops.size() * 2);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const Op& p = ops[i];
    if (!p.is_data()) continue;
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const Op& q = ops[j];
      if (!q.is_data() || q.txn == p.txn || q.var != p.var) continue;
      if (p.is_read() && q.is_read()) continue;
      Shape shape = p.is_read() ? Shape::kRW : (q.is_read() ? Shape::kWR : Shape::kWW);
      out.push_back(Conflict{i, j, p.txn, q.txn, p.var, shape});
    }
  }
  return out;
}

StatusCategory categorize(const Schedule& s, const Conflict& c, std::optional<std::size_t>* status_pos) {
  auto first_end = s.terminal_pos(c.from);
  auto second_end = s.terminal_pos(c.to);
  auto set = [&](std::optional<std::size_t> v) {
    if (status_pos) *status_pos = v;
  };
  bool first_committed = s.status(c.from) == TxnStatus::kCommitted;

  if (first_end && *first_end < c.second) {
    set(first_end);
    return first_committed ? StatusCategory::kCommittedBefore : StatusCategory::kAbortedBefore;
  }
  if (!first_end && !second_end) {
    set(std::nullopt);
    return StatusCategory::kUndone;
  }
  // Whichever transaction terminates first after q decides.
  if (first_end && (!second_end || *first_end < *second_end)) {
    set(first_end);
    return first_committed ? StatusCategory::kFirstCommitsAfter : StatusCategory::kFirstAbortsAfter;
  }
  set(second_end);
  return s.status(c.to) == TxnStatus::kCommitted ? StatusCategory::kSecondCommitsFirst
                                                 : StatusCategory::kSecondAbortsFirst;
}

std::vector<StatusedConflict> conflicts_with_status(const Schedule& s) {
  std::vector<Conflict> cs = conflicts(s);
  std::vector<StatusedConflict> out;
  out.reserve(cs.size());
  for (Conflict& c : cs) {
    StatusedConflict sc;
    sc.category = categorize(s, c, &sc.status_pos);
    sc.conflict = std::move(c);
    out.push_back(std::move(sc));
  }
  return out;
}

std::optional<PopKind> pop_kind(Shape shape, StatusCategory category) {
  switch (category) {
    case StatusCategory::kAbortedBefore:
    case StatusCategory::kSecondAbortsFirst:
      return std::nullopt;
    case StatusCategory::kCommittedBefore:
      switch (shape) {
        case Shape::kWR: return PopKind::kWCR;
        case Shape::kWW: return PopKind::kWCW;
        case Shape::kRW: return PopKind::kRCW;
      }
      break;
    case StatusCategory::kFirstCommitsAfter:
      // W_iR_jC_i and R_iW_jC_i collapse to their base shapes.
      switch (shape) {
        case Shape::kWR: return PopKind::kWR;
        case Shape::kWW: return PopKind::kWWC;
        case Shape::kRW: return PopKind::kRW;
      }
      break;
    case StatusCategory::kFirstAbortsAfter:
      switch (shape) {
        case Shape::kWR: return PopKind::kWRA;
        case Shape::kWW: return PopKind::kWWA;
        case Shape::kRW: return PopKind::kRW;
      }
      break;
    case StatusCategory::kSecondCommitsFirst:
    case StatusCategory::kUndone:
      switch (shape) {
        case Shape::kWR: return PopKind::kWR;
        case Shape::kWW: return PopKind::kWW;
        case Shape::kRW: return PopKind::kRW;
      }
      break;
  }
  return std::nullopt;
}

std::vector<PopEdge> pops(const Schedule& s, PopOptions options) {
  std::vector<StatusedConflict> cs = conflicts_with_status(s);
  std::vector<PopEdge> out;
  out.reserve(cs.size());
  for (const StatusedConflict& sc : cs) {
    auto kind = pop_kind(sc.conflict.shape, sc.category);
    if (!kind) continue;
    if (*kind == PopKind::kRCW && options.strict_rcw) {
      auto own = ops_of(s, sc.conflict.from);
      if (std::none_of(own.begin(), own.end(), [](const Op* op) { return op->is_write(); })) continue;
    }
    PopEdge e;
    e.from = sc.conflict.from;
    e.to = sc.conflict.to;
    e.var = sc.conflict.var;
    e.kind = *kind;
    e.first_pos = sc.conflict.first;
    e.second_pos = sc.conflict.second;
    if (is_self_cycle(*kind) || is_committed_kind(*kind)) e.status_pos = sc.status_pos;
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), edge_less);
  return out;
}

}  // namespace anomaly_lens
