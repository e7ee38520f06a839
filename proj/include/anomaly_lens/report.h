#pragma once

// Stable JSON documents for the command-line front end.

#include <string>
#include <string_view>

#include <json.hpp>

#include "anomaly_lens/classify.h"
#include "anomaly_lens/isolation.h"

namespace anomaly_lens {

inline constexpr std::string_view kSchemaVersion = "1.0";

using Json = nlohmann::ordered_json;

Json to_json(const PopEdge& e);
Json to_json(const Cycle& c);
Json to_json(const AnomalyReport& r);

struct ReportOptions {
  ClassifyOptions classify;
  bool with_dot = false;
};

// {schemaVersion, input, pops, cycles, truncated, anomaly, verdicts, dot?}.
// verdicts maps "simplified" and "fine" to {level: "allowed" | "violates"}.
Json make_report(const Schedule& s, ReportOptions options = {});

Json to_json(const LevelSystem& lvl, const CheckVerdict& v);

}  // namespace anomaly_lens
