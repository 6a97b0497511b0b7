#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "sharesim/planner.hpp"
#include "sharesim/scenario_io.hpp"

using namespace sharesim;

namespace {

Scenario load_shipped(const char* name) {
  return load_scenario_file(std::string(SHARESIM_SCENARIO_DIR "/") + name);
}

Scenario two_class(std::int64_t heavy_shares, std::int64_t light_shares) {
  Scenario s;
  s.alloc.pool_total = heavy_shares + light_shares;
  s.alloc.groups = {{"H", heavy_shares}, {"L", light_shares}};
  s.alloc.users = {{"heavy", "H", heavy_shares, std::nullopt},
                   {"light", "L", light_shares, std::nullopt}};
  UserWorkload wl;
  wl.processes = 20;
  wl.demand_ms = 500;
  wl.think_ms = 0;
  s.workload.by_user = {{"heavy", wl}, {"light", wl}};
  s.sim.duration_ms = 1000;
  return s;
}

}  // namespace

TEST_CASE("one process, no think time: the server runs flat out") {
  Scenario s = two_class(5, 5);
  s.workload.by_user.pop_back();
  s.workload.by_user[0].second.processes = 1;
  s.workload.by_user[0].second.demand_ms = 100;
  const PlanReport r = predict(s);  // light inactive: heavy owns the machine
  const auto& row = *r.find("heavy");
  CHECK(row.utilization == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(row.resp_mean_ms == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(row.tps == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("two saturating classes settle on their entitlements") {
  const PlanReport r = predict(two_class(90, 10));
  CHECK(r.find("heavy")->utilization == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(r.find("light")->utilization == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(r.total_utilization == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("think time leaves headroom and the surplus is shared") {
  Scenario s = two_class(90, 10);
  for (auto& [user, wl] : s.workload.by_user) {
    wl.processes = 2;
    wl.think_ms = 5000;
  }
  const PlanReport r = predict(s);
  CHECK(r.total_utilization < 1.0);
  CHECK(r.find("heavy")->capacity > r.find("heavy")->entitlement);  // idle donated
  CHECK(r.find("heavy")->resp_mean_ms >= 500.0);
}

TEST_CASE("consolidating every group multiplies usrA/usrB response by ~10") {
  const Scenario s = load_shipped("consolidation.scn");
  const WhatIfReport w =
      what_if(s, {{"usrA", "usrB"}, {"dbms", "web", "usrA", "usrB", "usrC"}});
  REQUIRE(w.reports.size() == 2);
  const auto& before = w.reports[0];
  const auto& after = w.reports[1];
  CHECK(before.find("usrA")->resp_mean_ms == doctest::Approx(11000.0 / 6.0).epsilon(1e-6));
  CHECK(before.find("usrB")->resp_mean_ms == doctest::Approx(2200.0).epsilon(1e-6));
  CHECK(after.find("usrA")->resp_mean_ms == doctest::Approx(50000.0 / 3.0).epsilon(1e-6));
  CHECK(after.find("usrB")->resp_mean_ms == doctest::Approx(20000.0).epsilon(1e-6));
  REQUIRE(w.deltas.size() == 1);
  const auto& dA = w.deltas[0][2];  // allocation order: dbms, web, usrA, ...
  REQUIRE(dA.user == "usrA");
  CHECK(dA.resp_ratio == doctest::Approx(100.0 / 11.0).epsilon(1e-6));
  CHECK(dA.resp_ratio > 8.0);
  CHECK(dA.resp_ratio < 12.0);
}

TEST_CASE("caps bound the predicted capacity") {
  const PlanReport r = predict(load_shipped("capdemo.scn"));
  CHECK(r.find("solo")->capacity == doctest::Approx(0.10).epsilon(1e-6));
  CHECK(r.find("solo")->utilization == doctest::Approx(0.10).epsilon(1e-6));
  CHECK(r.find("rest")->utilization == 0.0);
}

TEST_CASE("identical hypotheses produce zero deltas") {
  const Scenario s = load_shipped("consolidation.scn");
  const WhatIfReport w = what_if(s, {{"usrA", "usrB"}, {"usrA", "usrB"}});
  for (const auto& d : w.deltas[0]) {
    CHECK(d.d_entitlement == 0.0);
    CHECK(d.d_utilization == 0.0);
    CHECK(d.d_resp_mean_ms == 0.0);
    CHECK(d.d_tps == 0.0);
  }
}

TEST_CASE("planner input errors") {
  const Scenario s = load_shipped("consolidation.scn");
  SUBCASE("no hypotheses") {
    try {
      (void)what_if(s, {});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("no hypotheses") != std::string::npos);
    }
  }
  SUBCASE("empty active set") { CHECK_THROWS_AS((void)predict(s, {}), ValidationError); }
  SUBCASE("unknown active user") { CHECK_THROWS_AS((void)predict(s, {"ghost"}), ValidationError); }
  SUBCASE("active user without processes") {
    Scenario t = s;
    apply_override(t, "workload.web.processes=0");
    CHECK_THROWS_AS((void)predict(t, {"web"}), ValidationError);
  }
  SUBCASE("nothing active anywhere") {
    Scenario t = s;
    for (auto& [user, wl] : t.workload.by_user) wl.processes = 0;
    CHECK_THROWS_AS((void)predict(t), ValidationError);
  }
}

TEST_CASE("randomized: saturation ceiling, non-negativity, monotone load") {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<int> procs(1, 30);
  std::uniform_real_distribution<double> demand(10.0, 2000.0), think(0.0, 8000.0);
  std::uniform_int_distribution<std::int64_t> share(1, 100);
  for (int c = 0; c < 100; ++c) {
    CAPTURE(c);
    Scenario s = two_class(share(rng), share(rng));
    for (auto& [user, wl] : s.workload.by_user) {
      wl.processes = procs(rng);
      wl.demand_ms = demand(rng);
      wl.think_ms = think(rng);
    }
    const PlanReport r = predict(s);
    REQUIRE(r.total_utilization <= 1.0 + 1e-6);
    for (const auto& row : r.rows) {
      REQUIRE(row.utilization >= 0.0);
      REQUIRE(row.resp_mean_ms >= 0.0);
      REQUIRE(row.tps >= 0.0);
      REQUIRE(row.utilization <= row.capacity + 1e-9);
    }

    Scenario more = s;
    more.workload.by_user[0].second.processes += 1;
    const PlanReport r2 = predict(more);
    // relative slack: the fixed point is only solved to ~1e-6 in capacity
    REQUIRE(r2.find("heavy")->resp_mean_ms >= r.find("heavy")->resp_mean_ms * (1.0 - 2e-3));
  }
}

TEST_CASE("suggest_shares maps consumption to a valid allocation") {
  SUBCASE("a clean 45/30/25 split") {
    const SuggestReport r = suggest_shares({{"A", 0.45}, {"B", 0.30}, {"C", 0.25}}, 100);
    CHECK(r.rows[0].shares == 45);
    CHECK(r.rows[1].shares == 30);
    CHECK(r.rows[2].shares == 25);
    CHECK_FALSE(r.pointless_precision);
    CHECK(validate_allocation(r.allocation).empty());
  }
  SUBCASE("thirds: the residue goes to the first-listed tie winner") {
    const SuggestReport r =
        suggest_shares({{"A", 1.0 / 3.0}, {"B", 1.0 / 3.0}, {"C", 1.0 / 3.0}}, 100);
    CHECK(r.rows[0].shares == 34);
    CHECK(r.rows[1].shares == 33);
    CHECK(r.rows[2].shares == 33);
    CHECK(validate_allocation(r.allocation).empty());
  }
  SUBCASE("a huge pool repeats the proportions and flags the precision") {
    const SuggestReport r =
        suggest_shares({{"A", 1.0 / 3.0}, {"B", 1.0 / 3.0}, {"C", 1.0 / 3.0}}, 10000);
    CHECK(r.rows[0].shares == 3334);
    CHECK(r.rows[1].shares == 3333);
    CHECK(r.rows[2].shares == 3333);
    CHECK(r.pointless_precision);
    CHECK(validate_allocation(r.allocation).empty());
  }
  SUBCASE("everyone gets at least one share") {
    const SuggestReport r = suggest_shares({{"A", 0.99}, {"B", 1e-9}}, 10);
    CHECK(r.rows[1].shares == 1);
    CHECK(r.rows[0].shares == 9);
    CHECK(validate_allocation(r.allocation).empty());
  }
  SUBCASE("fractions need not sum to one") {
    const SuggestReport r = suggest_shares({{"A", 0.40}, {"B", 0.20}}, 100);
    CHECK(r.rows[0].shares == 67);
    CHECK(r.rows[1].shares == 33);
  }
  SUBCASE("wiggle-room flag fires when the grant outruns the measurement") {
    const SuggestReport r =
        suggest_shares({{"A", 0.40}, {"B", 0.20}}, 100, {{"A", 900.0}, {"B", 250.0}});
    CHECK(r.rows[0].wiggle_flag);  // 0.67 promised vs 0.40 demonstrated
    CHECK(r.rows[1].wiggle_flag);
    const SuggestReport none = suggest_shares({{"A", 0.40}, {"B", 0.20}}, 100);
    CHECK_FALSE(none.rows[0].wiggle_flag);  // no response data, no flag
  }
  SUBCASE("input errors") {
    CHECK_THROWS_AS((void)suggest_shares({}, 100), ValidationError);
    CHECK_THROWS_AS((void)suggest_shares({{"A", 0.0}, {"B", 0.0}}, 100), ValidationError);
    CHECK_THROWS_AS((void)suggest_shares({{"A", -0.1}}, 100), ValidationError);
    CHECK_THROWS_AS((void)suggest_shares({{"A", 0.5}, {"B", 0.5}}, 1), ValidationError);
  }
}
