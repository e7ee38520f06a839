#include "anomaly_lens/isolation.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace anomaly_lens {

namespace {

using enum AnomalyClass;
using enum Subclass;

constexpr bool P = true;
constexpr bool N = false;

// Columns: NRW, NA.
constexpr PermitRow kSimplified[] = {
    {kWAT, kSDA, "Dirty Write", {N, N}},
    {kWAT, kSDA, "Lost Update", {N, N}},
    {kWAT, kSDA, "Lost Self Update", {N, N}},
    {kWAT, kSDA, "Full-Write", {N, N}},
    {kWAT, kSDA, "Full-Write Committed", {N, N}},
    {kWAT, kSDA, "Lost Self Update Committed", {N, N}},
    {kWAT, kDDA, "Read-Write Skew 1", {N, N}},
    {kWAT, kDDA, "Read-Write Skew 2", {N, N}},
    {kWAT, kDDA, "Double-Write Skew 1", {N, N}},
    {kWAT, kDDA, "Double-Write Skew 2", {N, N}},
    {kWAT, kDDA, "Double-Write Skew 2 Committed", {N, N}},
    {kWAT, kDDA, "Full-Write Skew", {N, N}},
    {kWAT, kDDA, "Full-Write Skew Committed", {N, N}},
    {kWAT, kMDA, "Step WAT", {N, N}},
    {kRAT, kSDA, "Dirty Read", {N, N}},
    {kRAT, kSDA, "Non-repeatable Read", {N, N}},
    {kRAT, kSDA, "Non-repeatable Read Committed", {N, N}},
    {kRAT, kSDA, "Intermediate Read", {N, N}},
    {kRAT, kDDA, "Read Skew", {N, N}},
    {kRAT, kDDA, "Read Skew 2", {N, N}},
    {kRAT, kDDA, "Write-Read Skew", {N, N}},
    {kRAT, kDDA, "Write-Read Skew Committed", {N, N}},
    {kRAT, kDDA, "Double-Write Skew 1 Committed", {N, N}},
    {kRAT, kMDA, "Step RAT", {N, N}},
    {kIAT, kSDA, "Lost Update Committed", {P, N}},
    {kIAT, kDDA, "Read Skew Committed", {P, N}},
    {kIAT, kDDA, "Read-Write Skew 1 Committed", {P, N}},
    {kIAT, kDDA, "Write Skew", {P, N}},
    {kIAT, kMDA, "Step IAT", {P, N}},
};

// Columns: NW, NRW, NPA, NA.
constexpr PermitRow kFineGrained[] = {
    {kWAT, kSDA, "Dirty Write", {N, N, N, N}},
    {kWAT, kSDA, "Lost Update", {N, N, N, N}},
    {kWAT, kSDA, "Lost Self Update", {N, N, N, N}},
    {kWAT, kSDA, "Full-Write", {N, N, N, N}},
    {kWAT, kSDA, "Full-Write Committed", {N, N, N, N}},
    {kWAT, kSDA, "Lost Self Update Committed", {N, N, N, N}},
    {kWAT, kDDA, "Read-Write Skew 1", {N, N, N, N}},
    {kWAT, kDDA, "Read-Write Skew 2", {N, N, N, N}},
    {kWAT, kDDA, "Double-Write Skew 1", {N, N, N, N}},
    {kWAT, kDDA, "Double-Write Skew 2", {N, N, N, N}},
    {kWAT, kDDA, "Double-Write Skew 2 Committed", {N, N, N, N}},
    {kWAT, kDDA, "Full-Write Skew", {N, N, N, N}},
    {kWAT, kDDA, "Full-Write Skew Committed", {N, N, N, N}},
    {kWAT, kMDA, "Step WAT", {N, N, N, N}},
    {kRAT, kSDA, "Dirty Read", {P, N, N, N}},
    {kRAT, kSDA, "Non-repeatable Read", {P, N, N, N}},
    {kRAT, kSDA, "Non-repeatable Read Committed", {P, P, N, N}},
    {kRAT, kSDA, "Intermediate Read", {P, N, N, N}},
    {kRAT, kDDA, "Read Skew", {P, P, N, N}},
    {kRAT, kDDA, "Read Skew 2", {P, N, N, N}},
    {kRAT, kDDA, "Write-Read Skew", {P, N, N, N}},
    {kRAT, kDDA, "Write-Read Skew Committed", {P, N, N, N}},
    {kRAT, kDDA, "Double-Write Skew 1 Committed", {P, N, N, N}},
    {kRAT, kMDA, "Step RAT", {P, N, N, N}},
    {kIAT, kSDA, "Lost Update Committed", {P, P, P, N}},
    {kIAT, kDDA, "Read Skew Committed", {P, P, P, N}},
    {kIAT, kDDA, "Read-Write Skew 1 Committed", {P, P, P, N}},
    {kIAT, kDDA, "Write Skew", {P, P, P, N}},
    {kIAT, kMDA, "Step IAT", {P, P, P, N}},
};

constexpr Level kSimplifiedLevels[] = {Level::kNRW, Level::kNA};
constexpr Level kFineLevels[] = {Level::kNW, Level::kNRW, Level::kNPA, Level::kNA};

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t column(const LevelSystem& lvl) {
  auto levels = levels_of(lvl.system);
  auto it = std::find(levels.begin(), levels.end(), lvl.level);
  if (it == levels.end()) {
    throw std::invalid_argument("level " + std::string(to_string(lvl.level)) + " is not part of the " +
                                std::string(to_string(lvl.system)) + " system");
  }
  return static_cast<std::size_t>(it - levels.begin());
}

}  // namespace

std::string_view to_string(System s) { return s == System::kSimplified ? "simplified" : "fine"; }

std::string_view to_string(Level l) {
  switch (l) {
    case Level::kNW: return "NW";
    case Level::kNRW: return "NRW";
    case Level::kNPA: return "NPA";
    case Level::kNA: return "NA";
  }
  return "?";
}

std::optional<System> system_from_string(std::string_view text) {
  std::string t = lower(text);
  if (t == "simplified") return System::kSimplified;
  if (t == "fine" || t == "fine-grained" || t == "finegrained") return System::kFineGrained;
  return std::nullopt;
}

std::optional<Level> level_from_string(std::string_view text) {
  std::string t = lower(text);
  for (Level l : kFineLevels) {
    if (lower(to_string(l)) == t) return l;
  }
  return std::nullopt;
}

std::span<const Level> levels_of(System s) {
  if (s == System::kSimplified) return kSimplifiedLevels;
  return kFineLevels;
}

LevelSystem make_level(System system, Level level) {
  LevelSystem lvl{system, level};
  column(lvl);
  return lvl;
}

std::span<const PermitRow> permit_table(System s) {
  if (s == System::kSimplified) return kSimplified;
  return kFineGrained;
}

bool permits(const LevelSystem& lvl, AnomalyClass cls, Subclass subclass, std::string_view name) {
  std::size_t col = column(lvl);
  auto table = permit_table(lvl.system);
  for (const PermitRow& row : table) {
    if (row.name == name) return row.possible[col];
  }
  // Unknown name: the Step row for MDA, else the first row of the same
  // class and subclass.
  if (subclass == Subclass::kMDA) {
    std::string_view step = step_form(cls).name;
    for (const PermitRow& row : table) {
      if (row.name == step) return row.possible[col];
    }
  }
  for (const PermitRow& row : table) {
    if (row.cls == cls && row.subclass == subclass) return row.possible[col];
  }
  return false;
}

bool permits(const LevelSystem& lvl, const AnomalyReport& report) {
  return permits(lvl, report.cls, report.subclass, report.name);
}

bool levels_monotone(System s) {
  auto levels = levels_of(s);
  for (const PermitRow& row : permit_table(s)) {
    for (std::size_t k = 1; k < levels.size(); ++k) {
      if (row.possible[k] && !row.possible[k - 1]) return false;
    }
  }
  return true;
}

CheckVerdict check_schedule(const LevelSystem& lvl, const Schedule& s, ClassifyOptions options) {
  column(lvl);
  CheckVerdict verdict;
  PopGraph g = build_pg(pops(s, options.pops), s.txns());
  CycleSearch search = find_cycles(g, options.cycle_limit);
  verdict.truncated = search.truncated;
  std::sort(search.cycles.begin(), search.cycles.end(), cycle_precedes);
  std::set<std::string> seen;
  for (const Cycle& c : search.cycles) {
    AnomalyReport r = classify_cycle(c);
    if (!seen.insert(r.name).second) continue;
    if (!permits(lvl, r)) verdict.violations.push_back(r);
    verdict.reports.push_back(std::move(r));
  }
  verdict.allowed = verdict.violations.empty();
  return verdict;
}

}  // namespace anomaly_lens
