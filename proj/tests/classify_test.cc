#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anomaly_lens/classify.h"
#include "anomaly_lens/enumerate.h"
#include "oracle.h"

using namespace anomaly_lens;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fixtures classify to their sidecars") {
  fs::path dir = fs::path(AL_SOURCE_DIR) / "fixtures";
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    fs::path side = entry.path();
    side.replace_extension(".expected.json");
    REQUIRE(fs::exists(side));
    auto want = nlohmann::json::parse(slurp(side));
    ParseOptions opts;
    if (want.value("laxVersions", false)) opts.versions = VersionMode::kLax;
    CAPTURE(entry.path().filename().string());
    Schedule s = parse(slurp(entry.path()), opts);
    ScheduleVerdict v = classify_schedule(s);
    if (want["anomaly"].is_null()) {
      CHECK(v.clean());
    } else {
      REQUIRE(v.anomaly);
      const auto& a = want["anomaly"];
      CHECK(to_string(v.anomaly->cls) == a["class"].get<std::string>());
      CHECK(to_string(v.anomaly->subclass) == a["subclass"].get<std::string>());
      CHECK(v.anomaly->name == a["name"].get<std::string>());
      if (a["form"].is_null())
        CHECK(v.anomaly->form == 0);
      else
        CHECK(v.anomaly->form == a["form"].get<int>());
    }
    ++n;
  }
  CHECK(n == 59);
}

TEST_CASE("class by kinds") {
  using enum PopKind;
  auto cls = [](std::initializer_list<PopKind> ks) { return class_of(std::vector<PopKind>(ks)); };
  CHECK(cls({kWW, kRW}) == AnomalyClass::kWAT);
  CHECK(cls({kWWA}) == AnomalyClass::kWAT);
  CHECK(cls({kWR, kWCW}) == AnomalyClass::kRAT);
  CHECK(cls({kWRA}) == AnomalyClass::kRAT);
  CHECK(cls({kRW, kWCR}) == AnomalyClass::kIAT);
  CHECK(cls({kRCW, kWCW}) == AnomalyClass::kIAT);
  CHECK(cls({kWR, kWWC}) == AnomalyClass::kWAT);
}

TEST_CASE("subclass by footprint") {
  CHECK(subclass_of(1, 2) == Subclass::kSDA);
  CHECK(subclass_of(2, 2) == Subclass::kDDA);
  CHECK(subclass_of(1, 3) == Subclass::kMDA);
  CHECK(subclass_of(3, 3) == Subclass::kMDA);
  CHECK(subclass_of(2, 4) == Subclass::kMDA);
}

TEST_CASE("form table") {
  auto forms = anomaly_forms();
  CHECK(forms.size() == 29);
  std::size_t sda = 0, dda = 0, mda = 0;
  for (const AnomalyForm& f : forms) {
    (f.subclass == Subclass::kSDA ? sda : f.subclass == Subclass::kDDA ? dda : mda)++;
    CHECK(find_form(f.name) == &f);
    if (f.number) CHECK(&form_by_number(f.number) == &f);
  }
  CHECK(sda == 11);
  CHECK(dda == 15);
  CHECK(mda == 3);
  CHECK(form_by_number(1).name == "Dirty Write");
  CHECK(form_by_number(8).name == "Lost Update");
  CHECK(form_by_number(9).name == "Lost Self Update");
  CHECK(step_form(AnomalyClass::kRAT).name == "Step RAT");
  CHECK(find_form("nope") == nullptr);
  for (AnomalyClass c : {AnomalyClass::kWAT, AnomalyClass::kRAT, AnomalyClass::kIAT})
    CHECK(anomaly_class_from_string(to_string(c)) == c);
}

TEST_CASE("W_iW_j ordering truth table") {
  CHECK(ww_status_outcome(parse_ww_ordering("CiCj")));
  CHECK(ww_status_outcome(parse_ww_ordering("C_i,A_j")));
  CHECK(ww_status_outcome(parse_ww_ordering("Ai Cj")));
  CHECK(ww_status_outcome(parse_ww_ordering("AiAj")));
  CHECK(ww_status_outcome(parse_ww_ordering("CjCi")));
  CHECK_FALSE(ww_status_outcome(parse_ww_ordering("CjAi")));
  CHECK_FALSE(ww_status_outcome(parse_ww_ordering("AjCi")));
  CHECK_FALSE(ww_status_outcome(parse_ww_ordering("AjAi")));
  CHECK_THROWS_AS(parse_ww_ordering("CiCi"), std::invalid_argument);
  for (WwOrdering o : kAllWwOrderings) CHECK(parse_ww_ordering(to_string(o)) == o);
}

TEST_CASE("Examples from the text") {
  auto v = classify_schedule(parse("R1[x0]W2[x1]W2[y1]W3[y2]W3[z1]R1[z1]R3[x1]W4[x2]"));
  REQUIRE(v.anomaly);
  CHECK(v.anomaly->subclass == Subclass::kMDA);
  CHECK(v.anomaly->cls == AnomalyClass::kRAT);
  CHECK(v.anomaly->name == "Step RAT");
  auto e3 = classify_schedule(parse("W1[x]R2[x]A1W2[y]C2R3[y]"));
  REQUIRE(e3.anomaly);
  CHECK(e3.anomaly->name == "Dirty Read");
  CHECK(classify_schedule(parse("R1[x0]W1[x1]C1R2[x1]W2[x2]C2")).clean());
}

TEST_CASE("unmatched two-transaction cycles are rejected") {
  CHECK_FALSE(form_for_pair(PopKind::kWCR, PopKind::kWCR, Subclass::kSDA).has_value());
  CHECK(form_for_pair(PopKind::kWW, PopKind::kWR, Subclass::kSDA) == 9);
  CHECK(form_for_pair(PopKind::kRW, PopKind::kRW, Subclass::kDDA) == 26);
}

TEST_CASE("classifier agrees with the oracle") {
  std::size_t anomalous = 0, total = 0;
  for (EnumSpec spec : {EnumSpec{2, 1, 2, true}, EnumSpec{2, 2, 2, true}, EnumSpec{3, 1, 1, true}}) {
    for_each_schedule(spec, [&](const Schedule& s) {
      ScheduleVerdict v = classify_schedule(s);
      REQUIRE(v.clean() == !oracle::has_cycle(s));
      if (v.anomaly) {
        ++anomalous;
        std::vector<PopKind> ks;
        for (const PopEdge& e : v.anomaly->cycle.edges) ks.push_back(e.kind);
        REQUIRE(v.anomaly->cls == class_of(ks));
        REQUIRE(v.anomaly->subclass ==
                subclass_of(v.anomaly->cycle.num_vars(), v.anomaly->cycle.num_txns()));
        REQUIRE(find_form(v.anomaly->name) != nullptr);
      }
      ++total;
    });
  }
  CHECK(anomalous > 0);
  CHECK(anomalous < total);
}
