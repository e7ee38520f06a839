// anomaly-lens: classify schedules, check them against isolation levels,
// print the two-transaction catalogs and run the scheduler simulator.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "anomaly_lens/classify.h"
#include "anomaly_lens/enumerate.h"
#include "anomaly_lens/isolation.h"
#include "anomaly_lens/report.h"
#include "anomaly_lens/simulate.h"

namespace al = anomaly_lens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFound = 1;
constexpr int kExitError = 2;

struct InputFlags {
  std::string file = "-";
  std::string expr;
  bool lax = false;
};

void add_input(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("input", in.file, "schedule file, '-' for stdin")->capture_default_str();
  cmd->add_option("-e,--expr", in.expr, "schedule text given inline");
  cmd->add_flag("--lax-versions", in.lax, "only require write versions to increase");
}

std::vector<al::Schedule> read_input(const InputFlags& in) {
  std::string text;
  if (!in.expr.empty()) {
    text = in.expr;
  } else if (in.file == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(in.file);
    if (!f) throw std::runtime_error("cannot open " + in.file);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  al::ParseOptions opts;
  opts.versions = in.lax ? al::VersionMode::kLax : al::VersionMode::kStrict;
  auto schedules = al::parse_file(text, opts);
  if (schedules.empty()) throw std::runtime_error("no schedule in input");
  return schedules;
}

void emit(const al::Json& docs) { std::cout << docs.dump(2) << '\n'; }

al::Json one_or_many(std::vector<al::Json> docs) {
  if (docs.size() == 1) return std::move(docs.front());
  al::Json arr = al::Json::array();
  for (auto& d : docs) arr.push_back(std::move(d));
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect and classify data anomalies in transaction schedules"};
  app.require_subcommand(1);

  InputFlags classify_in;
  bool with_dot = false;
  bool json_flag = false;
  auto* classify = app.add_subcommand("classify", "report POPs, cycles and the named anomaly as JSON");
  add_input(classify, classify_in);
  classify->add_flag("--dot", with_dot, "include a Graphviz rendering");
  classify->add_flag("--json", json_flag, "JSON output (the default)");

  InputFlags check_in;
  std::string system_name = "simplified";
  std::string level_name = "NA";
  auto* check = app.add_subcommand("check", "check schedules against an isolation level");
  add_input(check, check_in);
  check->add_option("--system", system_name, "simplified | fine")->capture_default_str();
  check->add_option("--level", level_name, "NW | NRW | NPA | NA")->capture_default_str();
  check->add_flag("--json", json_flag, "JSON output (the default)");

  bool sda = false, dda = false, enum_json = false;
  auto* enumerate = app.add_subcommand("enumerate", "print a two-transaction catalog");
  auto* sda_flag = enumerate->add_flag("--sda", sda, "single variable");
  auto* dda_flag = enumerate->add_flag("--dda", dda, "two variables");
  sda_flag->excludes(dda_flag);
  enumerate->add_flag("--json", enum_json, "JSON instead of a table");

  al::SchedulerConfig cfg;
  std::string strategies;
  auto* simulate = app.add_subcommand("simulate", "run the seeded scheduler and print the run as JSON");
  simulate->add_option("--seed", cfg.seed)->capture_default_str();
  simulate->add_option("--strategies", strategies, "csv of block-ww, read-committed, snapshot, full-cycle-check");
  simulate->add_option("--txns", cfg.workload.num_txns)->capture_default_str();
  simulate->add_option("--vars", cfg.workload.num_vars)->capture_default_str();
  simulate->add_option("--min-ops", cfg.workload.min_ops)->capture_default_str();
  simulate->add_option("--max-ops", cfg.workload.max_ops)->capture_default_str();
  simulate->add_option("--write-ratio", cfg.workload.write_ratio)->capture_default_str();
  simulate->add_option("--abort-ratio", cfg.workload.abort_ratio)->capture_default_str();
  simulate->add_flag("--json", json_flag, "JSON output (the default)");

  InputFlags dot_in;
  auto* dot = app.add_subcommand("dot", "print the POP graph in Graphviz format");
  add_input(dot, dot_in);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*classify) {
      al::ReportOptions opts;
      opts.with_dot = with_dot;
      bool found = false;
      std::vector<al::Json> docs;
      for (const al::Schedule& s : read_input(classify_in)) {
        docs.push_back(al::make_report(s, opts));
        found = found || !docs.back()["anomaly"].is_null();
      }
      emit(one_or_many(std::move(docs)));
      return found ? kExitFound : kExitOk;
    }
    if (*check) {
      auto sys = al::system_from_string(system_name);
      auto lvl = al::level_from_string(level_name);
      if (!sys) throw std::invalid_argument("unknown system '" + system_name + "'");
      if (!lvl) throw std::invalid_argument("unknown level '" + level_name + "'");
      al::LevelSystem ls = al::make_level(*sys, *lvl);
      bool violates = false;
      std::vector<al::Json> docs;
      for (const al::Schedule& s : read_input(check_in)) {
        al::CheckVerdict v = al::check_schedule(ls, s);
        violates = violates || !v.allowed;
        al::Json j = al::to_json(ls, v);
        j["input"] = al::format(s);
        docs.push_back(std::move(j));
      }
      emit(one_or_many(std::move(docs)));
      return violates ? kExitFound : kExitOk;
    }
    if (*enumerate) {
      if (!sda && !dda) throw std::invalid_argument("enumerate needs --sda or --dda");
      al::Catalog c = sda ? al::enumerate_sda() : al::enumerate_dda();
      std::cout << (enum_json ? al::catalog_json(c) : al::catalog_table(c));
      return kExitOk;
    }
    if (*simulate) {
      cfg.strategies = al::parse_strategies(strategies);
      std::cout << al::to_json(al::simulate(cfg));
      return kExitOk;
    }
    if (*dot) {
      auto schedules = read_input(dot_in);
      const al::Schedule& s = schedules.front();
      al::ScheduleVerdict v = al::classify_schedule(s);
      std::optional<al::Cycle> highlight;
      if (v.anomaly) highlight = v.anomaly->cycle;
      std::cout << al::to_dot(al::build_pg(v.pops, s.txns()), highlight);
      return kExitOk;
    }
  } catch (const al::ParseError& e) {
    std::cerr << "anomaly-lens: " << e.what() << '\n';
    return kExitError;
  } catch (const al::ScheduleError& e) {
    std::cerr << "anomaly-lens: invalid schedule at op " << e.op_index() << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "anomaly-lens: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
