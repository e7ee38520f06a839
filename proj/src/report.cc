#include "anomaly_lens/report.h"

namespace anomaly_lens {

Json to_json(const PopEdge& e) {
  Json j;
  j["from"] = e.from;
  j["to"] = e.to;
  j["var"] = e.var;
  j["kind"] = std::string(to_string(e.kind));
  j["label"] = e.label();
  j["first"] = e.first_pos;
  j["second"] = e.second_pos;
  j["status"] = e.status_pos ? Json(*e.status_pos) : Json(nullptr);
  if (e.implicit_back) j["implicitBack"] = true;
  return j;
}

Json to_json(const Cycle& c) {
  Json j;
  j["label"] = c.label();
  j["txns"] = c.txns();
  j["vars"] = c.vars();
  j["edges"] = Json::array();
  for (const PopEdge& e : c.edges) j["edges"].push_back(to_json(e));
  return j;
}

Json to_json(const AnomalyReport& r) {
  Json j;
  j["class"] = std::string(to_string(r.cls));
  j["subclass"] = std::string(to_string(r.subclass));
  j["name"] = r.name;
  j["form"] = r.form == 0 ? Json(nullptr) : Json(r.form);
  j["formal"] = r.formal_expression;
  j["cycle"] = r.cycle.label();
  return j;
}

Json make_report(const Schedule& s, ReportOptions options) {
  ScheduleVerdict v = classify_schedule(s, options.classify);
  Json j;
  j["schemaVersion"] = std::string(kSchemaVersion);
  j["input"] = format(s);
  j["pops"] = Json::array();
  for (const PopEdge& e : v.pops) j["pops"].push_back(to_json(e));
  j["cycles"] = Json::array();
  for (const Cycle& c : v.cycles) j["cycles"].push_back(c.label());
  j["truncated"] = v.truncated;
  j["anomaly"] = v.anomaly ? to_json(*v.anomaly) : Json(nullptr);
  Json verdicts;
  for (System sys : {System::kSimplified, System::kFineGrained}) {
    Json per;
    for (Level l : levels_of(sys)) {
      CheckVerdict cv = check_schedule(LevelSystem{sys, l}, s, options.classify);
      per[std::string(to_string(l))] = cv.allowed ? "allowed" : "violates";
    }
    verdicts[std::string(to_string(sys))] = per;
  }
  j["verdicts"] = verdicts;
  if (options.with_dot) {
    std::optional<Cycle> highlight;
    if (v.anomaly) highlight = v.anomaly->cycle;
    j["dot"] = to_dot(build_pg(v.pops, s.txns()), highlight);
  }
  return j;
}

Json to_json(const LevelSystem& lvl, const CheckVerdict& v) {
  Json j;
  j["schemaVersion"] = std::string(kSchemaVersion);
  j["system"] = std::string(to_string(lvl.system));
  j["level"] = std::string(to_string(lvl.level));
  j["verdict"] = v.allowed ? "Allowed" : "Violates";
  j["violations"] = Json::array();
  for (const AnomalyReport& r : v.violations) j["violations"].push_back(to_json(r));
  j["anomalies"] = Json::array();
  for (const AnomalyReport& r : v.reports) j["anomalies"].push_back(to_json(r));
  j["truncated"] = v.truncated;
  return j;
}

}  // namespace anomaly_lens
