#include "anomaly_lens/classify.h"

#include <algorithm>
#include <array>
#include <map>
#include <utility>

namespace anomaly_lens {

namespace {

using enum AnomalyClass;
using enum Subclass;

constexpr std::array<AnomalyForm, 29> kForms{{
    {1, "Dirty Write", kWAT, kSDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...A{i}/C{i}"},
    {2, "Dirty Read", kRAT, kSDA, "W{i}[{x}_m]...R{j}[{x}_m]...A{i}"},
    {3, "Lost Self Update Committed", kWAT, kSDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...C{j}...R{i}[{x}_m+1]"},
    {4, "Full-Write Committed", kWAT, kSDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...C{j}...W{i}[{x}_m+2]"},
    {5, "Non-repeatable Read Committed", kIAT, kSDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...C{j}...R{i}[{x}_m+1]"},
    {6, "Lost Update Committed", kIAT, kSDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...C{j}...W{i}[{x}_m+2]"},
    {7, "Full-Write", kWAT, kSDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...W{i}[{x}_m+2]"},
    {8, "Lost Update", kWAT, kSDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...W{i}[{x}_m+2]"},
    {9, "Lost Self Update", kWAT, kSDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...R{i}[{x}_m+1]"},
    {10, "Non-repeatable Read", kRAT, kSDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...R{i}[{x}_m+1]"},
    {11, "Intermediate Read", kRAT, kSDA, "W{i}[{x}_m]...R{j}[{x}_m]...W{i}[{x}_m+1]"},
    {12, "Double-Write Skew 2 Committed", kWAT, kDDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...C{j}...R{i}[{y}_n]"},
    {13, "Full-Write Skew Committed", kWAT, kDDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...C{j}...W{i}[{y}_n+1]"},
    {14, "Write-Read Skew Committed", kRAT, kDDA, "W{i}[{x}_m]...R{j}[{x}_m]...W{j}[{y}_n]...C{j}...R{i}[{y}_n]"},
    {15, "Double-Write Skew 1 Committed", kRAT, kDDA, "W{i}[{x}_m]...R{j}[{x}_m]...W{j}[{y}_n]...C{j}...W{i}[{y}_n+1]"},
    {16, "Read Skew Committed", kIAT, kDDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...C{j}...R{i}[{y}_n]"},
    {17, "Read-Write Skew 1 Committed", kIAT, kDDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...C{j}...W{i}[{y}_n+1]"},
    {18, "Full-Write Skew", kWAT, kDDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...W{i}[{y}_n+1]"},
    {19, "Double-Write Skew 1", kWAT, kDDA, "W{i}[{x}_m]...R{j}[{x}_m]...W{j}[{y}_n]...W{i}[{y}_n+1]"},
    {20, "Read-Write Skew 1", kWAT, kDDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...W{i}[{y}_n+1]"},
    {21, "Double-Write Skew 2", kWAT, kDDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...R{i}[{y}_n]"},
    {22, "Write-Read Skew", kRAT, kDDA, "W{i}[{x}_m]...R{j}[{x}_m]...W{j}[{y}_n]...R{i}[{y}_n]"},
    {23, "Read Skew", kRAT, kDDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...W{j}[{y}_n]...R{i}[{y}_n]"},
    {24, "Read-Write Skew 2", kWAT, kDDA, "W{i}[{x}_m]...W{j}[{x}_m+1]...R{j}[{y}_n]...W{i}[{y}_n+1]"},
    {25, "Read Skew 2", kRAT, kDDA, "W{i}[{x}_m]...R{j}[{x}_m]...R{j}[{y}_n]...W{i}[{y}_n+1]"},
    {26, "Write Skew", kIAT, kDDA, "R{i}[{x}_m]...W{j}[{x}_m+1]...R{j}[{y}_n]...W{i}[{y}_n+1]"},
    {0, "Step WAT", kWAT, kMDA, "...W[x_m]...W[x_m+1]..., N_D>=3"},
    {0, "Step RAT", kRAT, kMDA, "...W[x_m]...R[x_m]..., N_D>=3, no W[x_m]...W[x_m+1]"},
    {0, "Step IAT", kIAT, kMDA, "no W[x_m]...W[x_m+1], no W[x_m]...R[x_m], N_D>=3"},
}};

using Pair = std::pair<PopKind, PopKind>;
using enum PopKind;

// Single variable, two transactions. p_ij never carries a committed kind:
// t_i cannot act again after committing before t_j's operation.
const std::map<Pair, int>& sda_table() {
  static const std::map<Pair, int> table{
      {{kWW, kWCR}, 3},  {{kWR, kWCR}, 3},
      {{kWW, kWCW}, 4},  {{kWR, kWCW}, 4},  {{kWW, kRCW}, 4},
      {{kWR, kRCW}, 4},  // W1R2C2W1, captioned Full-Write Committed
      {{kRW, kWCR}, 5},
      {{kRW, kWCW}, 6},  {{kRW, kRCW}, 6},
      {{kWW, kWW}, 7},   {{kWR, kWW}, 7},   {{kWW, kRW}, 7},
      {{kRW, kWW}, 8},   {{kRW, kRW}, 8},
      {{kWW, kWR}, 9},   {{kWR, kWR}, 9},
      {{kRW, kWR}, 10},
      {{kWR, kRW}, 11},
  };
  return table;
}

// Two variables, two transactions: p_ij on x, p_ji on y.
const std::map<Pair, int>& dda_table() {
  static const std::map<Pair, int> table{
      {{kWW, kWCR}, 12}, {{kWW, kWCW}, 13}, {{kWR, kWCR}, 14}, {{kWR, kWCW}, 15},
      {{kRW, kWCR}, 16}, {{kRW, kWCW}, 17}, {{kWW, kWW}, 18},  {{kWR, kWW}, 19},
      {{kRW, kWW}, 20},  {{kWW, kWR}, 21},  {{kWR, kWR}, 22},  {{kRW, kWR}, 23},
      {{kWW, kRW}, 24},  {{kWW, kRCW}, 24}, {{kWR, kRW}, 25},  {{kWR, kRCW}, 25},
      {{kRW, kRW}, 26},  {{kRW, kRCW}, 26},
  };
  return table;
}

std::string render(std::string_view pattern, TxnId i, TxnId j, const std::string& x, const std::string& y) {
  std::string out;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (pattern[k] == '{') {
      std::size_t close = pattern.find('}', k);
      std::string_view key = pattern.substr(k + 1, close - k - 1);
      if (key == "i") out += std::to_string(i);
      else if (key == "j") out += std::to_string(j);
      else if (key == "x") out += x;
      else if (key == "y") out += y;
      k = close;
    } else {
      out.push_back(pattern[k]);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(AnomalyClass c) {
  switch (c) {
    case kWAT: return "WAT";
    case kRAT: return "RAT";
    case kIAT: return "IAT";
  }
  return "?";
}

std::string_view to_string(Subclass s) {
  switch (s) {
    case kSDA: return "SDA";
    case kDDA: return "DDA";
    case kMDA: return "MDA";
  }
  return "?";
}

std::optional<AnomalyClass> anomaly_class_from_string(std::string_view text) {
  for (AnomalyClass c : {kWAT, kRAT, kIAT}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::optional<Subclass> subclass_from_string(std::string_view text) {
  for (Subclass s : {kSDA, kDDA, kMDA}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::span<const AnomalyForm> anomaly_forms() { return kForms; }

const AnomalyForm* find_form(std::string_view name) {
  for (const AnomalyForm& f : kForms) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const AnomalyForm& form_by_number(int number) {
  if (number < 1 || number > 26) throw std::out_of_range("form number " + std::to_string(number));
  return kForms[static_cast<std::size_t>(number - 1)];
}

const AnomalyForm& step_form(AnomalyClass cls) { return kForms[26 + static_cast<std::size_t>(cls)]; }

AnomalyClass class_of(std::span<const PopKind> kinds) {
  auto any = [&](std::initializer_list<PopKind> wanted) {
    return std::any_of(kinds.begin(), kinds.end(), [&](PopKind k) {
      return std::find(wanted.begin(), wanted.end(), k) != wanted.end();
    });
  };
  if (any({kWW, kWWC, kWWA})) return kWAT;
  if (any({kWR, kWRA})) return kRAT;
  return kIAT;
}

Subclass subclass_of(std::size_t num_vars, std::size_t num_txns) {
  if (num_txns == 2 && num_vars == 1) return kSDA;
  if (num_txns == 2 && num_vars == 2) return kDDA;
  return kMDA;
}

std::optional<int> form_for_pair(PopKind pij, PopKind pji, Subclass subclass) {
  if (subclass == kMDA) return std::nullopt;
  const auto& table = subclass == kSDA ? sda_table() : dda_table();
  auto it = table.find({pij, pji});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

AnomalyReport classify_cycle(const Cycle& c) {
  AnomalyReport report;
  report.cycle = c;
  std::vector<PopKind> kinds;
  for (const PopEdge& e : c.edges) kinds.push_back(e.kind);
  report.cls = class_of(kinds);
  report.subclass = subclass_of(c.num_vars(), c.num_txns());

  if (c.num_txns() != 2) {
    const AnomalyForm& f = step_form(report.cls);
    report.name = std::string(f.name);
    std::string formal;
    for (const PopEdge& e : c.edges) {
      if (!formal.empty()) formal += " -> ";
      formal += e.label();
    }
    report.formal_expression = formal;
    return report;
  }

  // A self-cycle POP names the cycle regardless of its partner edge.
  auto self = std::find_if(c.edges.begin(), c.edges.end(), [](const PopEdge& e) { return is_self_cycle(e.kind); });
  if (self != c.edges.end()) {
    bool dirty_write = std::any_of(kinds.begin(), kinds.end(), [](PopKind k) { return k == kWWC || k == kWWA; });
    const AnomalyForm& f = form_by_number(dirty_write ? 1 : 2);
    TxnId i = self->implicit_back ? self->to : self->from;
    TxnId j = self->implicit_back ? self->from : self->to;
    report.form = f.number;
    report.name = std::string(f.name);
    report.formal_expression = render(f.formal, i, j, self->var, self->var);
    return report;
  }

  const PopEdge* pij = &c.edges[0];
  const PopEdge* pji = &c.edges[1];
  bool swap = is_committed_kind(pij->kind) ||
              (!is_committed_kind(pji->kind) && pji->first_pos < pij->first_pos);
  if (swap) std::swap(pij, pji);

  auto number = form_for_pair(pij->kind, pji->kind, report.subclass);
  if (!number) {
    throw UnmatchedCycleError("no catalog entry for " + std::string(to_string(report.subclass)) + " pair " +
                              std::string(to_string(pij->kind)) + " - " + std::string(to_string(pji->kind)) +
                              " in cycle " + c.label());
  }
  const AnomalyForm& f = form_by_number(*number);
  report.form = f.number;
  report.name = std::string(f.name);
  report.formal_expression = render(f.formal, pij->from, pji->from, pij->var, pji->var);
  return report;
}

ScheduleVerdict classify_schedule(const Schedule& s, ClassifyOptions options) {
  ScheduleVerdict verdict;
  verdict.pops = pops(s, options.pops);
  PopGraph g = build_pg(verdict.pops, s.txns());
  CycleSearch search = find_cycles(g, options.cycle_limit);
  verdict.cycles = std::move(search.cycles);
  verdict.truncated = search.truncated;
  if (auto best = canonical_cycle(verdict.cycles)) verdict.anomaly = classify_cycle(*best);
  return verdict;
}

WwOrdering parse_ww_ordering(std::string_view text) {
  std::string sig;
  for (char c : text) {
    if (c == 'C' || c == 'A' || c == 'i' || c == 'j') sig.push_back(c);
  }
  for (WwOrdering o : kAllWwOrderings) {
    if (to_string(o) == sig) return o;
  }
  throw std::invalid_argument("invalid terminal ordering '" + std::string(text) + "'");
}

std::string_view to_string(WwOrdering ordering) {
  switch (ordering) {
    case WwOrdering::kCommitICommitJ: return "CiCj";
    case WwOrdering::kCommitIAbortJ: return "CiAj";
    case WwOrdering::kAbortICommitJ: return "AiCj";
    case WwOrdering::kAbortIAbortJ: return "AiAj";
    case WwOrdering::kCommitJCommitI: return "CjCi";
    case WwOrdering::kCommitJAbortI: return "CjAi";
    case WwOrdering::kAbortJCommitI: return "AjCi";
    case WwOrdering::kAbortJAbortI: return "AjAi";
  }
  return "?";
}

bool ww_status_outcome(WwOrdering ordering) {
  switch (ordering) {
    case WwOrdering::kCommitICommitJ:
    case WwOrdering::kCommitIAbortJ:
    case WwOrdering::kAbortICommitJ:
    case WwOrdering::kAbortIAbortJ:
    case WwOrdering::kCommitJCommitI:
      return true;
    case WwOrdering::kCommitJAbortI:  // A_i restores x0 after x2 was committed
    case WwOrdering::kAbortJCommitI:
    case WwOrdering::kAbortJAbortI:
      return false;
  }
  return false;
}

}  // namespace anomaly_lens
