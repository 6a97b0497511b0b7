#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sharesim/sched_fs.hpp"

using namespace sharesim;

namespace {
FsScheduler make(bool capping = false) { return FsScheduler{FsParams{}, 10, capping}; }
}  // namespace

TEST_CASE("cost accrues normalized by shares") {
  auto s = make();
  const int heavy = s.add_user(90, std::nullopt);
  const int light = s.add_user(10, std::nullopt);
  const int hp = s.add_process(heavy, 0);
  const int lp = s.add_process(light, 0);
  s.charge_tick(hp);
  s.charge_tick(lp);
  CHECK(s.cost(heavy) == doctest::Approx(10.0 / 90.0));
  CHECK(s.cost(light) == doctest::Approx(10.0 / 10.0));
}

TEST_CASE("usage folds cost with geometric decay") {
  auto s = make();
  const int u = s.add_user(10, std::nullopt);
  const int p = s.add_process(u, 0);
  for (int i = 0; i < 8; ++i) s.charge_tick(p);  // cost = 8 ticks / 10 shares = 8
  CHECK(s.cost(u) == doctest::Approx(8.0));
  s.decay_usage();
  CHECK(s.usage(u) == doctest::Approx(8.0));  // 0*0.5 + 8
  CHECK(s.cost(u) == 0.0);
  s.decay_usage();
  CHECK(s.usage(u) == doctest::Approx(4.0));  // idle window halves it
  s.decay_usage();
  CHECK(s.usage(u) == doctest::Approx(2.0));
}

TEST_CASE("sharepri decays by the nice-biased factor") {
  auto s = make();
  const int u = s.add_user(10, std::nullopt);
  const int p0 = s.add_process(u, 0);
  const int p19 = s.add_process(u, 19);
  const int pn19 = s.add_process(u, -19);
  s.on_ready(p0, 1);
  s.on_ready(p19, 2);
  s.on_ready(pn19, 3);

  // give everyone the same pressure first
  s.charge_tick(p0);  // cost 1
  s.decay_usage();    // usage 1
  s.tick_adjust();    // each active proc += usage * p_active = 1*3
  CHECK(s.sharepri(p0) == doctest::Approx(3.0));
  CHECK(s.sharepri(p19) == doctest::Approx(3.0));

  s.decay_sharepri();
  CHECK(s.sharepri(p0) == doctest::Approx(3.0 * 0.5));    // 0.01*0 + 0.5
  CHECK(s.sharepri(p19) == doctest::Approx(3.0 * 0.69));  // 0.01*19 + 0.5
  CHECK(s.sharepri(pn19) == doctest::Approx(3.0 * 0.31));
}

TEST_CASE("tick pressure counts the open window's cost and active processes") {
  auto s = make();
  const int a = s.add_user(50, std::nullopt);
  const int b = s.add_user(50, std::nullopt);
  const int a1 = s.add_process(a, 0);
  const int a2 = s.add_process(a, 0);
  const int b1 = s.add_process(b, 0);
  s.on_ready(a1, 1);
  s.on_ready(a2, 2);
  s.on_ready(b1, 3);

  for (int i = 0; i < 5; ++i) s.charge_tick(a1);  // cost_a = 5*10/50 = 1
  s.decay_usage();                                // usage_a = 1
  for (int i = 0; i < 5; ++i) s.charge_tick(a1);  // open-window cost_a = 1

  s.tick_adjust();
  CHECK(s.sharepri(a1) == doctest::Approx((1.0 + 1.0) * 2));  // (usage+cost)*p_active
  CHECK(s.sharepri(a2) == doctest::Approx(4.0));
  CHECK(s.sharepri(b1) == 0.0);
  CHECK(s.select_next() == b1);
}

TEST_CASE("blocked processes neither gain pressure nor count as active") {
  auto s = make();
  const int u = s.add_user(10, std::nullopt);
  const int p1 = s.add_process(u, 0);
  const int p2 = s.add_process(u, 0);
  CHECK(s.p_active(u) == 0);
  s.on_ready(p1, 1);
  s.on_ready(p2, 2);
  CHECK(s.p_active(u) == 2);
  s.set_running(p1);
  CHECK(s.p_active(u) == 2);  // running still holds the cpu claim
  s.on_block(p1);
  CHECK(s.p_active(u) == 1);

  s.charge_tick(p2);
  s.decay_usage();
  s.tick_adjust();
  CHECK(s.sharepri(p2) > 0.0);
  CHECK(s.sharepri(p1) == 0.0);  // blocked: untouched
  CHECK(s.select_next() == p2);
}

TEST_CASE("select is min sharepri with FIFO ties") {
  auto s = make();
  const int u = s.add_user(10, std::nullopt);
  const int p1 = s.add_process(u, 0);
  const int p2 = s.add_process(u, 0);
  s.on_ready(p1, 5);
  s.on_ready(p2, 2);
  CHECK(s.select_next() == p2);  // tie on sharepri, lower seq
  s.set_running(p2);
  CHECK(s.select_next() == p1);
  s.on_preempt(p2, 7);
  CHECK(s.select_next() == p1);
  s.on_block(p1);
  s.on_block(p2);
  CHECK(s.select_next() == -1);
}

TEST_CASE("caps throttle on the trailing window") {
  auto s = make(true);
  const int u = s.add_user(10, 0.1);
  const int p = s.add_process(u, 0);
  s.on_ready(p, 1);

  // greedy loop: run whenever allowed; cap 0.1 over a 4000 ms window
  int busy = 0;
  const int horizon = 4000;  // ticks = 40 s
  for (int t = 0; t < horizon; ++t) {
    if (!s.user_throttled(u)) {
      s.charge_tick(p);
      s.cap_tick(u);
      ++busy;
    } else {
      s.cap_tick(-1);
    }
  }
  const double frac = static_cast<double>(busy) / horizon;
  CHECK(frac >= 0.08);
  CHECK(frac <= 0.12);
}

TEST_CASE("a full cap never throttles") {
  auto s = make(true);
  const int u = s.add_user(10, 1.0);
  const int p = s.add_process(u, 0);
  s.on_ready(p, 1);
  for (int t = 0; t < 1000; ++t) {
    CHECK_FALSE(s.user_throttled(u));
    s.charge_tick(p);
    s.cap_tick(u);
  }
}

TEST_CASE("without capping enabled declared caps are inert") {
  auto s = make(false);
  const int u = s.add_user(10, 0.1);
  const int p = s.add_process(u, 0);
  s.on_ready(p, 1);
  for (int t = 0; t < 100; ++t) {
    s.charge_tick(p);
    s.cap_tick(u);
  }
  CHECK_FALSE(s.user_throttled(u));
}
