#pragma once

// Isolation levels as permit tables over named anomalies.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly_lens/classify.h"
#include "anomaly_lens/schedule.h"

namespace anomaly_lens {

enum class System : std::uint8_t { kSimplified, kFineGrained };
enum class Level : std::uint8_t { kNW, kNRW, kNPA, kNA };

std::string_view to_string(System s);
std::string_view to_string(Level l);
// Accepts "simplified" / "fine" / "fine-grained", case-insensitive.
std::optional<System> system_from_string(std::string_view text);
std::optional<Level> level_from_string(std::string_view text);

// Levels of a system from weakest to strictest.
std::span<const Level> levels_of(System s);

struct LevelSystem {
  System system = System::kSimplified;
  Level level = Level::kNA;
};

// Throws std::invalid_argument when `level` is not part of `system`.
LevelSystem make_level(System system, Level level);

struct PermitRow {
  AnomalyClass cls;
  Subclass subclass;
  std::string_view name;
  // One cell per level of the system, weakest first. true = Possible.
  std::array<bool, 4> possible;
};

std::span<const PermitRow> permit_table(System s);

bool permits(const LevelSystem& lvl, AnomalyClass cls, Subclass subclass, std::string_view name);
bool permits(const LevelSystem& lvl, const AnomalyReport& report);

// The Not Possible set of every level contains that of each weaker level.
bool levels_monotone(System s);

struct CheckVerdict {
  bool allowed = true;
  // One report per distinct anomaly name among all cycles, in canonical order.
  std::vector<AnomalyReport> reports;
  std::vector<AnomalyReport> violations;
  bool truncated = false;
};

CheckVerdict check_schedule(const LevelSystem& lvl, const Schedule& s, ClassifyOptions options = {});

}  // namespace anomaly_lens
