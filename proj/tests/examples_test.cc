#include <doctest.h>

#include <algorithm>

#include "anomaly_lens/classify.h"
#include "anomaly_lens/isolation.h"

using namespace anomaly_lens;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::optional<Cycle> cycle_over(const Schedule& s, std::size_t txns) {
  for (const Cycle& c : find_cycles(build_pg(s)).cycles)
    if (c.num_txns() == txns) return c;
  return std::nullopt;
}

}  // namespace

TEST_CASE("parse and format") {
  Schedule e1 = parse("W1[x0]W1[x1]W2[x3]R1[x3]C1C2", {VersionMode::kLax});
  CHECK(e1.size() == 6);
  CHECK(e1.txns() == std::set<TxnId>{1, 2});
  CHECK(e1.vars() == std::set<std::string>{"x"});
  Schedule empty = parse("");
  CHECK(empty.empty());
  CHECK(empty.txns().empty());
  CHECK(format(empty).empty());
  CHECK(format(parse("R1[x] W2[x] C2 R1[x]")) == "R1[x0]W2[x1]C2R1[x1]");
  CHECK(format(parse("W1[x]R2[x]A1W2[y]C2R3[y]")) == "W1[x1]R2[x1]A1W2[y1]C2R3[y1]");
  CHECK(format(parse("R1[x0]W2[x1]C2W1[x2]")) == "R1[x0]W2[x1]C2W1[x2]");
}

TEST_CASE("conflict edge cases") {
  CHECK(conflicts(parse("R1[x0]W1[x1]C1")).empty());
  CHECK(conflicts(parse("R1[x0]R2[x0]C1C2")).empty());
  CHECK(pops(parse("R1[x0]W1[x1]C1")).empty());
  auto aborted = conflicts_with_status(parse("W1[x1]A1R2[x0]C2"));
  REQUIRE(aborted.size() == 1);
  CHECK(aborted[0].category == StatusCategory::kAbortedBefore);
  CHECK(aborted[0].inert());
  auto undone = conflicts_with_status(parse("W1[x1]R2[x1]"));
  REQUIRE(undone.size() == 1);
  CHECK(undone[0].category == StatusCategory::kUndone);
}

TEST_CASE("graph shapes") {
  Schedule e3 = parse("W1[x]R2[x]A1W2[y]C2R3[y]");
  PopGraph g3 = build_pg(e3);
  CHECK(g3.vertices() == std::set<TxnId>{1, 2, 3});
  REQUIRE(g3.edges().size() == 2);
  CHECK(g3.all_edges().size() == 3);
  CHECK(std::count_if(g3.all_edges().begin(), g3.all_edges().end(),
                      [](const PopEdge& e) { return e.implicit_back && e.from == 2 && e.to == 1; }) == 1);
  PopGraph lone = build_pg(std::vector<PopEdge>{}, std::set<TxnId>{1});
  CHECK(lone.vertices().size() == 1);
  CHECK(lone.edges().empty());
  CHECK(build_pg(parse("R1[x0]W2[x1]W2[y1]W3[y2]W3[z1]R1[z1]R3[x1]W4[x2]")).vertices().size() == 4);
  CHECK(find_cycles(build_pg(parse("R1[x0]C1W2[x1]C2"))).cycles.empty());
  auto wra = find_cycles(build_pg(parse("W1[x1]R2[x1]A1"))).cycles;
  REQUIRE(wra.size() == 1);
  CHECK(wra[0].edges.size() == 2);
}

TEST_CASE("canonical cycle picks the earliest completion") {
  // Two 2-cycles over disjoint pairs: t1/t2 completes at position 5, t3/t4 at 7.
  Schedule s = parse("R1[x0]R3[y0]W2[x1]W4[y1]C2W1[x2]C4W3[y2]");
  auto cs = find_cycles(build_pg(s)).cycles;
  REQUIRE(cs.size() == 2);
  auto best = canonical_cycle(cs);
  REQUIRE(best);
  CHECK(best->max_anchor() == 5);
  CHECK(best->txns() == std::vector<TxnId>{1, 2});
  CHECK(canonical_cycle({cs[1]}) == cs[1]);
}

TEST_CASE("reductions of three and five transaction cycles") {
  Schedule three = parse("R1[x0]W2[x1]W3[x2]R1[x2]");
  auto c3 = cycle_over(three, 3);
  REQUIRE(c3);
  Cycle r3 = reduce_single_var_cycle(*c3, three);
  CHECK(r3.num_txns() == 2);
  CHECK(r3.label() == "(R1W2[x]), (W2R1[x])");

  Schedule five = parse("R1[x0]W2[x1]R3[x1]W4[x2]W5[x3]R1[x3]");
  auto c5 = cycle_over(five, 5);
  REQUIRE(c5);
  CHECK(c5->label() == "(R1W2[x]), (W2R3[x]), (R3W4[x]), (W4W5[x]), (W5R1[x])");
  Cycle r5 = reduce_single_var_cycle(*c5, five);
  CHECK(r5.num_txns() == 2);
  auto all = find_cycles(build_pg(five)).cycles;
  CHECK(std::find(all.begin(), all.end(), r5) != all.end());
}

TEST_CASE("PG equivalence") {
  CHECK_FALSE(pg_equivalent(parse("R1[x0]W2[x1]R1[x1]"), parse("R1[x0]R1[x0]W2[x1]")));
  Schedule a = parse("R1[x0]W2[x1]C2");
  Schedule b = parse("R1[x0]W2[x1]C2");
  Schedule c = parse("R1[x0]W2[x1]C2");
  CHECK(pg_equivalent(a, b));
  CHECK(pg_equivalent(b, a));
  CHECK((pg_equivalent(a, b) && pg_equivalent(b, c)) == pg_equivalent(a, c));
}

TEST_CASE("DOT rendering") {
  std::string empty = to_dot(build_pg(std::vector<PopEdge>{}, std::set<TxnId>{}));
  std::string squashed;
  for (char ch : empty)
    if (!std::isspace(static_cast<unsigned char>(ch))) squashed += ch;
  CHECK(squashed == "digraphpg{}");
  std::string e3 = to_dot(build_pg(parse("W1[x]R2[x]A1W2[y]C2R3[y]")));
  CHECK(e3.find("WRA[x]") != std::string::npos);
  CHECK(e3.find("WCR[y]") != std::string::npos);
  Schedule e4 = parse("R1[x0]W2[x1]W2[y1]W3[y2]W3[z1]R1[z1]R3[x1]W4[x2]");
  PopGraph g4 = build_pg(e4);
  std::string dot = to_dot(g4, canonical_cycle(find_cycles(g4).cycles));
  CHECK(count_of(dot, "color=red") == 3);
}

TEST_CASE("named cycles") {
  auto named = [](const char* text) {
    auto v = classify_schedule(parse(text));
    REQUIRE(v.anomaly);
    return std::make_tuple(std::string(to_string(v.anomaly->cls)), std::string(to_string(v.anomaly->subclass)),
                           v.anomaly->name);
  };
  CHECK(named("R1[x0]W2[x1]R1[x1]") == std::make_tuple("RAT", "SDA", "Non-repeatable Read"));
  CHECK(named("R1[x0]W2[x1]C2W1[x2]") == std::make_tuple("IAT", "SDA", "Lost Update Committed"));
  CHECK(named("R1[x0]W2[x1]W2[y1]C2R1[y1]") == std::make_tuple("IAT", "DDA", "Read Skew Committed"));
  CHECK(named("R1[x0]W2[x1]R2[y0]W1[y1]") == std::make_tuple("IAT", "DDA", "Write Skew"));
  CHECK(named("R1[x0]W2[x1]W2[y1]R3[y1]R3[z0]W1[z1]") == std::make_tuple("RAT", "MDA", "Step RAT"));
  CHECK(named("W1[x1]R2[x1]A1") == std::make_tuple("RAT", "SDA", "Dirty Read"));
  CHECK(named("R1[x0]W2[x1]W1[x2]") == std::make_tuple("WAT", "SDA", "Lost Update"));
  CHECK(classify_schedule(parse("R1[x0]C1R2[x0]C2")).clean());
}

TEST_CASE("named permits and checks") {
  using enum Level;
  auto simple = [](Level l) { return LevelSystem{System::kSimplified, l}; };
  auto fine = [](Level l) { return LevelSystem{System::kFineGrained, l}; };
  CHECK(permits(simple(kNRW), AnomalyClass::kIAT, Subclass::kDDA, "Write Skew"));
  CHECK_FALSE(permits(simple(kNRW), AnomalyClass::kRAT, Subclass::kSDA, "Dirty Read"));
  CHECK(permits(fine(kNRW), AnomalyClass::kRAT, Subclass::kDDA, "Read Skew"));
  for (const PermitRow& r : permit_table(System::kFineGrained)) {
    CHECK_FALSE(permits(fine(kNA), r.cls, r.subclass, r.name));
    CHECK_FALSE(permits(simple(kNA), r.cls, r.subclass, r.name));
  }
  Schedule skew = parse("R1[x0]W2[x1]R2[y0]W1[y1]C1C2");
  CHECK(check_schedule(simple(kNRW), skew).allowed);
  CheckVerdict na = check_schedule(simple(kNA), skew);
  CHECK_FALSE(na.allowed);
  REQUIRE_FALSE(na.violations.empty());
  CHECK(na.violations[0].name == "Write Skew");
  CHECK(check_schedule(simple(kNA), parse("R1[x0]W1[x1]C1R2[x1]C2")).allowed);
}
