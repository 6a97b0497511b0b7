#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sharesim/sched_ts.hpp"

using namespace sharesim;

TEST_CASE("priority follows decayed cpu plus nice bias") {
  TsScheduler s{TsParams{}};
  const int a = s.add_process(0);
  const int b = s.add_process(19);
  CHECK(s.priority(a) == 0.0);
  CHECK(s.priority(b) == 19.0);

  s.charge_tick(a);
  s.charge_tick(a);
  CHECK(s.recent_cpu(a) == 2.0);
  CHECK(s.priority(a) == 1.0);  // cpu_weight 0.5

  s.decay_recent_cpu();
  CHECK(s.recent_cpu(a) == 1.0);  // decay_per_s 0.5
  CHECK(s.recent_cpu(b) == 0.0);
}

TEST_CASE("priority clamps to the level range") {
  TsScheduler s{TsParams{}};
  const int a = s.add_process(0);
  for (int i = 0; i < 1000; ++i) s.charge_tick(a);
  CHECK(s.priority(a) == 59.0);  // levels-1
  const int b = s.add_process(-19);
  CHECK(s.priority(b) == 0.0);  // never negative
}

TEST_CASE("completion resets the burst's cpu penalty") {
  TsScheduler s{TsParams{}};
  const int a = s.add_process(0);
  for (int i = 0; i < 7; ++i) s.charge_tick(a);
  CHECK(s.recent_cpu(a) == 7.0);
  s.on_complete(a);
  CHECK(s.recent_cpu(a) == 0.0);
  CHECK(s.priority(a) == 0.0);
}

TEST_CASE("sustained running converges to the saturation fixed point") {
  // one second = 100 ticks of accrual, then a halving: x -> x/2 + 50 -> 100
  TsScheduler s{TsParams{}};
  const int a = s.add_process(0);
  for (int sec = 0; sec < 100; ++sec) {
    for (int t = 0; t < 100; ++t) s.charge_tick(a);
    s.decay_recent_cpu();
  }
  CHECK(s.recent_cpu(a) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("select prefers low priority, then FIFO") {
  TsScheduler s{TsParams{}};
  const int a = s.add_process(0);
  const int b = s.add_process(0);
  const int c = s.add_process(5);

  SUBCASE("idle when nothing is ready") { CHECK(s.select_next() == -1); }

  s.on_ready(a, 1);
  s.on_ready(b, 2);
  s.on_ready(c, 3);
  SUBCASE("equal priority: earliest seq wins") { CHECK(s.select_next() == a); }
  SUBCASE("nice pushes a process behind") {
    s.on_block(a);
    s.on_block(b);
    CHECK(s.select_next() == c);
  }
  SUBCASE("accrued cpu pushes a process behind") {
    for (int i = 0; i < 12; ++i) s.charge_tick(a);  // priority 6 > c's 5
    CHECK(s.select_next() == b);
    s.on_block(b);
    CHECK(s.select_next() == c);
  }
  SUBCASE("quantum expiry goes to the back of its level") {
    s.on_block(a);
    s.on_quantum_expiry(a, 4);
    CHECK(s.select_next() == b);
  }
  SUBCASE("blocked processes are skipped") {
    s.on_block(a);
    CHECK(s.select_next() == b);
    s.on_block(b);
    s.on_block(c);
    CHECK(s.select_next() == -1);
  }
}

TEST_CASE("decay applies to every process, running or not") {
  TsScheduler s{TsParams{}};
  const int a = s.add_process(0);
  const int b = s.add_process(0);
  for (int i = 0; i < 8; ++i) s.charge_tick(a);
  for (int i = 0; i < 4; ++i) s.charge_tick(b);
  s.on_block(b);
  s.decay_recent_cpu();
  CHECK(s.recent_cpu(a) == 4.0);
  CHECK(s.recent_cpu(b) == 2.0);
}
