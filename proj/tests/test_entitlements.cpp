#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sharesim/entitlements.hpp"
#include "sharesim/types.hpp"

using namespace sharesim;

namespace {

// DBMS 60, Web 10, Users 30 split 6/5/19 — the canonical consolidation box.
ShareAllocation consolidation_alloc() {
  ShareAllocation a;
  a.pool_total = 100;
  a.groups = {{"DBMS", 60}, {"Web", 10}, {"Users", 30}};
  a.users = {{"dbms", "DBMS", 60, std::nullopt},
             {"web", "Web", 10, std::nullopt},
             {"usrA", "Users", 6, std::nullopt},
             {"usrB", "Users", 5, std::nullopt},
             {"usrC", "Users", 19, std::nullopt}};
  return a;
}

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

ShareAllocation random_alloc(std::mt19937_64& rng) {
  ShareAllocation a;
  std::uniform_int_distribution<int> ngroups(1, 5), nusers(1, 4);
  std::uniform_int_distribution<std::int64_t> share(1, 1000);
  const int gcount = ngroups(rng);
  for (int g = 0; g < gcount; ++g) {
    const GroupId gid = "g" + std::to_string(g);
    std::int64_t gsum = 0;
    const int ucount = nusers(rng);
    for (int u = 0; u < ucount; ++u) {
      const std::int64_t sh = share(rng);
      a.users.push_back({gid + "u" + std::to_string(u), gid, sh, std::nullopt});
      gsum += sh;
    }
    a.groups.push_back({gid, gsum});
    a.pool_total += gsum;
  }
  return a;
}

}  // namespace

TEST_CASE("static entitlements match hand arithmetic exactly") {
  const auto t = static_entitlements(consolidation_alloc());
  CHECK(near(t.find("dbms")->static_e, 0.60));
  CHECK(near(t.find("web")->static_e, 0.10));
  CHECK(near(t.find("usrA")->static_e, 0.06));
  CHECK(near(t.find("usrB")->static_e, 0.05));
  CHECK(near(t.find("usrC")->static_e, 0.19));
  REQUIRE(t.group_static.size() == 3);
  CHECK(near(t.group_static[0].second, 0.60));
  CHECK(near(t.group_static[1].second, 0.10));
  CHECK(near(t.group_static[2].second, 0.30));
}

TEST_CASE("idle DBMS renormalizes the survivors") {
  const auto t = dynamic_entitlements(consolidation_alloc(), {"web", "usrA", "usrB", "usrC"});
  CHECK(near(t.find("dbms")->dynamic_e, 0.0));
  CHECK(near(t.find("web")->dynamic_e, 0.25));
  CHECK(near(t.find("usrA")->dynamic_e, 0.15));
  CHECK(near(t.find("usrB")->dynamic_e, 0.125));
  CHECK(near(t.find("usrC")->dynamic_e, 0.475));
  CHECK_FALSE(t.find("dbms")->active);
  CHECK(t.find("web")->active);
}

TEST_CASE("all-active dynamic equals static") {
  const auto a = consolidation_alloc();
  const auto t = dynamic_entitlements(a, {"dbms", "web", "usrA", "usrB", "usrC"});
  for (const auto& r : t.rows) CHECK(near(r.dynamic_e, r.static_e));
}

TEST_CASE("caps limit the effective entitlement without redistribution") {
  auto a = consolidation_alloc();
  a.capping_enabled = true;
  a.users[2].cap = 0.10;  // usrA
  SUBCASE("sole active user is pinned at the cap") {
    const auto t = effective_entitlements(a, {"usrA"});
    CHECK(near(t.find("usrA")->dynamic_e, 1.0));
    CHECK(near(t.find("usrA")->effective_e, 0.10));
    double sum = 0;
    for (const auto& r : t.rows) sum += r.effective_e;
    CHECK(near(sum, 0.10));  // the rest idles; nobody inherits it
  }
  SUBCASE("cap above the dynamic share changes nothing") {
    a.users[2].cap = 0.9;
    const auto t = effective_entitlements(a, {"usrA", "usrB"});
    CHECK(near(t.find("usrA")->effective_e, 6.0 / 11.0));
  }
  SUBCASE("capping disabled ignores declared caps") {
    a.capping_enabled = false;
    const auto t = effective_entitlements(a, {"usrA"});
    CHECK(near(t.find("usrA")->effective_e, 1.0));
  }
}

TEST_CASE("errors are reported as validation failures") {
  const auto a = consolidation_alloc();
  SUBCASE("empty active set") {
    CHECK_THROWS_AS((void)dynamic_entitlements(a, {}), ValidationError);
  }
  SUBCASE("unknown active user") {
    try {
      (void)dynamic_entitlements(a, {"ghost"});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].code == "active.unknown_user");
    }
  }
  SUBCASE("invalid allocation") {
    auto bad = a;
    bad.groups[0].shares = 59;
    CHECK_THROWS_AS((void)static_entitlements(bad), ValidationError);
  }
}

TEST_CASE("scale invariance: multiplying every share changes nothing") {
  auto a = consolidation_alloc();
  const auto base = static_entitlements(a);
  a.pool_total *= 7;
  for (auto& g : a.groups) g.shares *= 7;
  for (auto& u : a.users) u.shares *= 7;
  const auto scaled = static_entitlements(a);
  for (std::size_t i = 0; i < base.rows.size(); ++i)
    CHECK(near(base.rows[i].static_e, scaled.rows[i].static_e));
}

TEST_CASE("randomized: sum-to-one, dominance, and monotonicity") {
  std::mt19937_64 rng(20260825);
  int cases = 0;
  while (cases < 1000) {
    auto a = random_alloc(rng);
    CAPTURE(cases);

    const auto t = static_entitlements(a);
    double ssum = 0;
    for (const auto& r : t.rows) ssum += r.static_e;
    REQUIRE(near(ssum, 1.0));
    double gsum = 0;
    for (const auto& [g, e] : t.group_static) gsum += e;
    REQUIRE(near(gsum, 1.0));

    // random non-empty active subset: actives sum to one and never lose
    // entitlement relative to the static grant
    std::vector<UserId> active;
    for (const auto& u : a.users)
      if (rng() % 2 == 0) active.push_back(u.user);
    if (active.empty()) active.push_back(a.users[rng() % a.users.size()].user);
    const auto d = dynamic_entitlements(a, active);
    double dsum = 0;
    for (const auto& r : d.rows) {
      dsum += r.dynamic_e;
      if (r.active) REQUIRE(r.dynamic_e >= r.static_e - 1e-12);
      else REQUIRE(r.dynamic_e == 0.0);
    }
    REQUIRE(near(dsum, 1.0));

    // monotonicity: granting one user more shares never shrinks its cut
    const std::size_t pick = rng() % a.users.size();
    const std::int64_t bump = 1 + static_cast<std::int64_t>(rng() % 500);
    auto bigger = a;
    bigger.users[pick].shares += bump;
    for (auto& g : bigger.groups)
      if (g.group == bigger.users[pick].group) g.shares += bump;
    bigger.pool_total += bump;
    const auto t2 = static_entitlements(bigger);
    REQUIRE(t2.rows[pick].static_e >= t.rows[pick].static_e - 1e-12);
    const auto d2 = dynamic_entitlements(bigger, active);
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
      if (i == pick || !d.rows[i].active) continue;
      REQUIRE(d2.rows[i].dynamic_e <= d.rows[i].dynamic_e + 1e-12);
    }
    ++cases;
  }
  CHECK(cases == 1000);
}
