#include "sharesim/simcore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "sharesim/entitlements.hpp"
#include "sharesim/rng.hpp"
#include "sharesim/sched_fs.hpp"
#include "sharesim/sched_ts.hpp"

namespace sharesim {

const UserReport* SimReport::find(const UserId& u) const {
  for (const auto& r : users)
    if (r.user == u) return &r;
  return nullptr;
}

namespace {

constexpr std::size_t kRespSamplesPerWindow = 32;
// Ready-wait bound before the dispatch aging override kicks in; half the
// 30 s no-starvation contract, so the tail stays well inside it.
constexpr std::int64_t kAgingMs = 15'000;

enum class PState : char { thinking, ready, running };

struct Engine {
  const Scenario& s;
  std::vector<FsTraceRow>* trace;

  std::int64_t tick = 0;  // tick_ms
  std::int64_t dur = 0, warm = 0;  // in ticks
  std::int64_t win_ticks = 0;
  std::int64_t usage_win = 0, pri_win = 0, second_win = 0, quantum_ticks = 0, aging_ticks = 0;

  // users (allocation order)
  std::vector<UserId> uid;
  std::vector<int> wl_index;  // index into s.workload.by_user, -1 if none

  // processes
  std::vector<int> user_of;
  std::vector<rng::Stream> stream;
  std::vector<PState> pstate;
  std::vector<std::int64_t> demand_rem, cur_demand, think_rem;
  std::vector<std::int64_t> ready_since, last_service;

  TsScheduler* ts = nullptr;
  FsScheduler* fs = nullptr;

  std::uint64_t seq = 0;
  int runner = -1;
  std::int64_t quantum_left = 0;

  // accounting
  std::vector<std::int64_t> busy_meas, busy_total, trans_meas;
  std::vector<double> resp_sum;
  std::vector<std::vector<std::int64_t>> resp_all;
  std::vector<std::int64_t> completed_demand, census_sum, max_wait, preempts;
  std::int64_t idle_meas = 0;
  std::vector<std::vector<MetricRecord>> uwin;  // [user][window]

  explicit Engine(const Scenario& sc, std::vector<FsTraceRow>* tr) : s(sc), trace(tr) {}

  std::int64_t quantize_demand(double ms) const {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ms / static_cast<double>(tick))));
  }
  std::int64_t quantize_think(double ms) const {
    return static_cast<std::int64_t>(std::ceil(ms / static_cast<double>(tick)));
  }

  void draw_demand(int pid) {
    const auto& wl = s.workload.by_user[static_cast<std::size_t>(wl_index[user_of[pid]])].second;
    double ms = wl.demand_ms;
    if (wl.demand_dist == Dist::exponential) ms = stream[pid].exponential(wl.demand_ms);
    cur_demand[pid] = quantize_demand(ms);
    demand_rem[pid] = cur_demand[pid];
  }

  void draw_think(int pid) {
    const auto& wl = s.workload.by_user[static_cast<std::size_t>(wl_index[user_of[pid]])].second;
    double ms = wl.think_ms;
    if (wl.think_dist == Dist::exponential) ms = stream[pid].exponential(wl.think_ms);
    think_rem[pid] = quantize_think(ms);
  }

  SimReport run();
};

SimReport Engine::run() {
  tick = s.sched.tick_ms;
  dur = s.sim.duration_ms / tick;
  warm = s.sim.warmup_ms / tick;
  win_ticks = s.sim.metrics_window_ms / tick;
  usage_win = s.sched.fs.usage_window_ms / tick;
  pri_win = s.sched.fs.pri_window_ms / tick;
  second_win = 1000 / tick;
  quantum_ticks = s.sched.quantum_ms / tick;
  aging_ticks = std::max<std::int64_t>(1, kAgingMs / tick);

  const int nusers = static_cast<int>(s.alloc.users.size());
  TsScheduler ts_sched(s.sched.ts);
  FsScheduler fs_sched(s.sched.fs, tick, s.alloc.capping_enabled);
  const bool is_fs = s.sched.policy == Policy::fs;
  ts = &ts_sched;
  fs = &fs_sched;

  for (int u = 0; u < nusers; ++u) {
    const auto& ua = s.alloc.users[static_cast<std::size_t>(u)];
    uid.push_back(ua.user);
    fs_sched.add_user(ua.shares, ua.cap);
    int wli = -1;
    for (std::size_t i = 0; i < s.workload.by_user.size(); ++i)
      if (s.workload.by_user[i].first == ua.user) wli = static_cast<int>(i);
    wl_index.push_back(wli);
  }

  for (int u = 0; u < nusers; ++u) {
    if (wl_index[u] < 0) continue;
    const auto& wl = s.workload.by_user[static_cast<std::size_t>(wl_index[u])].second;
    for (int i = 0; i < wl.processes; ++i) {
      user_of.push_back(u);
      stream.emplace_back(s.sim.seed, uid[static_cast<std::size_t>(u)], i);
      pstate.push_back(PState::thinking);
      demand_rem.push_back(0);
      cur_demand.push_back(0);
      think_rem.push_back(0);
      ready_since.push_back(0);
      last_service.push_back(0);
      ts_sched.add_process(wl.nice);
      fs_sched.add_process(u, wl.nice);
    }
  }
  const int nprocs = static_cast<int>(user_of.size());

  busy_meas.assign(nusers, 0);
  busy_total.assign(nusers, 0);
  trans_meas.assign(nusers, 0);
  resp_sum.assign(nusers, 0.0);
  resp_all.assign(nusers, {});
  completed_demand.assign(nusers, 0);
  census_sum.assign(nusers, 0);
  max_wait.assign(nusers, 0);
  preempts.assign(nusers, 0);
  const std::int64_t nwindows = (dur + win_ticks - 1) / win_ticks;
  uwin.assign(nusers, {});
  for (int u = 0; u < nusers; ++u) {
    uwin[u].resize(static_cast<std::size_t>(nwindows));
    for (std::int64_t w = 0; w < nwindows; ++w) {
      auto& rec = uwin[u][static_cast<std::size_t>(w)];
      rec.entity = uid[static_cast<std::size_t>(u)];
      rec.window_start_ms = w * s.sim.metrics_window_ms;
      rec.window_end_ms = std::min((w + 1) * s.sim.metrics_window_ms, s.sim.duration_ms);
    }
  }

  // Everybody becomes ready at time zero; the first think phase is skipped.
  for (int pid = 0; pid < nprocs; ++pid) {
    pstate[pid] = PState::ready;
    ready_since[pid] = 0;
    last_service[pid] = 0;
    draw_demand(pid);
    ++seq;
    ts_sched.on_ready(pid, seq);
    fs_sched.on_ready(pid, seq);
  }

  std::vector<int> census(static_cast<std::size_t>(nusers), 0);

  for (std::int64_t T = 0; T <= dur; ++T) {
    const bool measured = T > warm;  // accounting covers the tick (T-1, T]

    // 1. account the tick that just elapsed
    if (T > 0) {
      int tick_user = -1;
      if (runner >= 0) {
        const int pid = runner;
        const int u = user_of[pid];
        tick_user = u;
        if (is_fs) fs_sched.charge_tick(pid);
        else ts_sched.charge_tick(pid);
        ++busy_total[u];
        if (measured) ++busy_meas[u];
        auto& wrec = uwin[u][static_cast<std::size_t>((T - 1) / win_ticks)];
        wrec.busy_ms += tick;
        --demand_rem[pid];
        --quantum_left;
        last_service[pid] = T;
        if (demand_rem[pid] == 0) {
          completed_demand[u] += cur_demand[pid];
          const double resp = static_cast<double>(T - ready_since[pid]) * static_cast<double>(tick);
          ++wrec.transactions;
          wrec.resp_sum_ms += resp;
          if (wrec.resp_samples.size() < kRespSamplesPerWindow) wrec.resp_samples.push_back(resp);
          if (measured) {
            ++trans_meas[u];
            resp_sum[u] += resp;
            resp_all[u].push_back((T - ready_since[pid]) * tick);
          }
          pstate[pid] = PState::thinking;
          draw_think(pid);
          ts_sched.on_complete(pid);
          ts_sched.on_block(pid);
          fs_sched.on_block(pid);
          runner = -1;
        } else if (quantum_left == 0) {
          ++preempts[u];
          pstate[pid] = PState::ready;
          ++seq;
          ts_sched.on_quantum_expiry(pid, seq);
          fs_sched.on_preempt(pid, seq);
          runner = -1;
        }
      } else if (measured) {
        ++idle_meas;
      }
      if (is_fs) fs_sched.cap_tick(tick_user);
    }
    if (T == dur) break;

    // 2. wake thinkers (pid order keeps FIFO deterministic)
    for (int pid = 0; pid < nprocs; ++pid) {
      if (pstate[pid] != PState::thinking) continue;
      if (think_rem[pid] <= 0) {
        pstate[pid] = PState::ready;
        ready_since[pid] = T;
        last_service[pid] = T;
        draw_demand(pid);
        ++seq;
        ts_sched.on_ready(pid, seq);
        fs_sched.on_ready(pid, seq);
      } else {
        --think_rem[pid];
      }
    }

    // 3. periodic decay work
    if (T > 0 && is_fs && T % usage_win == 0) {
      if (trace) {
        for (int u = 0; u < nusers; ++u)
          trace->push_back({T * tick, uid[static_cast<std::size_t>(u)], fs_sched.usage(u),
                            fs_sched.cost(u), fs_sched.p_active(u)});
      }
      fs_sched.decay_usage();
    }
    if (T > 0 && is_fs && T % pri_win == 0) fs_sched.decay_sharepri();
    if (T > 0 && !is_fs && T % second_win == 0) ts_sched.decay_recent_cpu();

    // 4. per-tick priority pressure, census, and wait tracking
    if (is_fs) fs_sched.tick_adjust();
    std::fill(census.begin(), census.end(), 0);
    for (int pid = 0; pid < nprocs; ++pid) {
      if (pstate[pid] == PState::ready) {
        ++census[static_cast<std::size_t>(user_of[pid])];
        const std::int64_t wait = T - std::max(ready_since[pid], last_service[pid]);
        if (wait > max_wait[user_of[pid]]) max_wait[user_of[pid]] = wait;
      } else if (pstate[pid] == PState::running) {
        ++census[static_cast<std::size_t>(user_of[pid])];
      }
    }
    if (T >= warm)
      for (int u = 0; u < nusers; ++u) census_sum[u] += census[static_cast<std::size_t>(u)];

    // 5. cap enforcement can preempt the runner mid-quantum
    if (is_fs && runner >= 0 && fs_sched.user_throttled(user_of[runner])) {
      pstate[runner] = PState::ready;
      ++seq;
      fs_sched.on_preempt(runner, seq);
      runner = -1;
    }

    // 6. dispatch
    if (runner < 0) {
      int pid = is_fs ? fs_sched.select_next() : ts_sched.select_next();
      if (pid >= 0 && is_fs) {
        // Aging override. sharepri order lets freshly woken processes (their
        // priority decayed while asleep) leapfrog one parked mid-transaction,
        // and under sustained wakeups that parking is unbounded. Within the
        // winning user, a process that has sat ready too long runs first.
        int oldest = -1;
        std::int64_t worst = aging_ticks - 1;  // eligible once wait reaches the bound
        for (int q = 0; q < nprocs; ++q) {
          if (pstate[q] != PState::ready || user_of[q] != user_of[pid]) continue;
          const std::int64_t wait = T - std::max(ready_since[q], last_service[q]);
          if (wait > worst) {
            worst = wait;
            oldest = q;
          }
        }
        if (oldest >= 0) pid = oldest;
      }
      if (pid >= 0) {
        runner = pid;
        quantum_left = quantum_ticks;
        pstate[pid] = PState::running;
        if (is_fs) fs_sched.set_running(pid);
        else ts_sched.on_block(pid);  // out of the ready queue while running
      }
    }
  }

  // ---- report assembly ----
  SimReport rep;
  rep.scenario_label = s.sim.label;
  rep.policy = s.sched.policy;
  rep.seed = s.sim.seed;
  rep.duration_ms = s.sim.duration_ms;
  rep.warmup_ms = s.sim.warmup_ms;
  rep.measured_ms = s.sim.duration_ms - s.sim.warmup_ms;

  std::vector<UserId> active;
  for (int u = 0; u < nusers; ++u)
    if (wl_index[u] >= 0 &&
        s.workload.by_user[static_cast<std::size_t>(wl_index[u])].second.processes > 0)
      active.push_back(uid[static_cast<std::size_t>(u)]);
  EntitlementTable ent;
  if (!active.empty()) ent = dynamic_entitlements(s.alloc, active);
  else ent = static_entitlements(s.alloc);

  const double meas_ms = static_cast<double>(rep.measured_ms);
  const double meas_s = meas_ms / 1000.0;
  const std::int64_t meas_ticks = dur - warm;

  for (int u = 0; u < nusers; ++u) {
    UserReport r;
    r.user = uid[static_cast<std::size_t>(u)];
    r.group = s.alloc.users[static_cast<std::size_t>(u)].group;
    r.shares = s.alloc.users[static_cast<std::size_t>(u)].shares;
    r.processes = wl_index[u] >= 0
                      ? s.workload.by_user[static_cast<std::size_t>(wl_index[u])].second.processes
                      : 0;
    const auto* erow = ent.find(r.user);
    r.entitlement_static = erow->static_e;
    r.entitlement_dynamic = active.empty() ? 0.0 : erow->dynamic_e;
    r.busy_ms = busy_meas[u] * tick;
    r.transactions = trans_meas[u];
    r.utilization = meas_ms > 0 ? static_cast<double>(r.busy_ms) / meas_ms : 0.0;
    r.tps = meas_s > 0 ? static_cast<double>(r.transactions) / meas_s : 0.0;
    r.work_tput_ms_per_s = meas_s > 0 ? static_cast<double>(r.busy_ms) / meas_s : 0.0;
    r.resp_mean_ms = r.transactions > 0 ? resp_sum[u] / static_cast<double>(r.transactions) : 0.0;
    if (!resp_all[u].empty()) {
      auto v = resp_all[u];
      std::sort(v.begin(), v.end());
      const auto n = static_cast<std::int64_t>(v.size());
      const auto idx = static_cast<std::size_t>(
          std::max<std::int64_t>(0, (n * 95 + 99) / 100 - 1));  // nearest-rank
      r.resp_p95_ms = static_cast<double>(v[idx]);
    }
    r.avg_in_service =
        meas_ticks > 0 ? static_cast<double>(census_sum[u]) / static_cast<double>(meas_ticks) : 0.0;
    r.preemptions = preempts[u];
    r.max_ready_wait_ms = max_wait[u] * tick;
    r.busy_ms_total = busy_total[u] * tick;
    r.completed_demand_ms = completed_demand[u] * tick;
    std::int64_t inflight = 0;
    for (int pid = 0; pid < nprocs; ++pid)
      if (user_of[pid] == u && pstate[pid] != PState::thinking)
        inflight += cur_demand[pid] - demand_rem[pid];
    r.inflight_demand_ms = inflight * tick;
    rep.users.push_back(std::move(r));
  }

  for (const auto& g : s.alloc.groups) {
    GroupReport gr;
    gr.group = g.group;
    std::vector<std::int64_t> merged;
    double rsum = 0;
    for (int u = 0; u < nusers; ++u) {
      if (s.alloc.users[static_cast<std::size_t>(u)].group != g.group) continue;
      gr.busy_ms += busy_meas[u] * tick;
      gr.transactions += trans_meas[u];
      rsum += resp_sum[u];
      merged.insert(merged.end(), resp_all[u].begin(), resp_all[u].end());
    }
    gr.utilization = meas_ms > 0 ? static_cast<double>(gr.busy_ms) / meas_ms : 0.0;
    gr.tps = meas_s > 0 ? static_cast<double>(gr.transactions) / meas_s : 0.0;
    gr.work_tput_ms_per_s = meas_s > 0 ? static_cast<double>(gr.busy_ms) / meas_s : 0.0;
    gr.resp_mean_ms = gr.transactions > 0 ? rsum / static_cast<double>(gr.transactions) : 0.0;
    if (!merged.empty()) {
      std::sort(merged.begin(), merged.end());
      const auto n = static_cast<std::int64_t>(merged.size());
      const auto idx =
          static_cast<std::size_t>(std::max<std::int64_t>(0, (n * 95 + 99) / 100 - 1));
      gr.resp_p95_ms = static_cast<double>(merged[idx]);
    }
    rep.groups.push_back(std::move(gr));
  }

  for (int u = 0; u < nusers; ++u) rep.busy_ms += busy_meas[u] * tick;
  rep.idle_ms = idle_meas * tick;
  rep.total_utilization = meas_ms > 0 ? static_cast<double>(rep.busy_ms) / meas_ms : 0.0;
  rep.max_ready_wait_ms = *std::max_element(max_wait.begin(), max_wait.end()) * tick;

  // user windows first (user order), then group windows built from them
  const auto nw = static_cast<std::size_t>((dur + win_ticks - 1) / win_ticks);
  for (int u = 0; u < nusers; ++u)
    for (auto& rec : uwin[u]) rep.windows.push_back(std::move(rec));
  for (const auto& g : s.alloc.groups) {
    for (std::size_t w = 0; w < nw; ++w) {
      MetricRecord rec;
      rec.entity = g.group;
      rec.is_group = true;
      rec.window_start_ms = static_cast<std::int64_t>(w) * s.sim.metrics_window_ms;
      rec.window_end_ms =
          std::min(static_cast<std::int64_t>(w + 1) * s.sim.metrics_window_ms, s.sim.duration_ms);
      for (int u = 0; u < nusers; ++u) {
        if (s.alloc.users[static_cast<std::size_t>(u)].group != g.group) continue;
        const auto& ur = rep.windows[static_cast<std::size_t>(u) * nw + w];
        rec.busy_ms += ur.busy_ms;
        rec.transactions += ur.transactions;
        rec.resp_sum_ms += ur.resp_sum_ms;
      }
      rep.windows.push_back(std::move(rec));
    }
  }
  return rep;
}

}  // namespace

SimReport run(const Scenario& s, std::vector<FsTraceRow>* fs_trace) {
  auto violations = validate_scenario(s);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  Engine e(s, fs_trace);
  return e.run();
}

SimReport run(const Scenario& s) { return run(s, nullptr); }

std::vector<SimReport> sweep(const Scenario& s, int n_lo, int n_hi, int jobs) {
  if (n_lo > n_hi) throw std::invalid_argument("empty process range");
  const int points = n_hi - n_lo + 1;
  std::vector<SimReport> out(static_cast<std::size_t>(points));
  auto run_point = [&](int i) {
    Scenario sn = s;
    for (auto& [user, wl] : sn.workload.by_user) wl.processes = n_lo + i;
    out[static_cast<std::size_t>(i)] = run(sn);
  };
  jobs = std::max(1, std::min(jobs, points));
  if (jobs == 1) {
    for (int i = 0; i < points; ++i) run_point(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < points; i = next.fetch_add(1)) run_point(i);
      });
    for (auto& t : pool) t.join();
  }
  return out;
}

CompareReport compare_policies(const Scenario& s, Policy first, Policy second) {
  Scenario a = s, b = s;
  a.sched.policy = first;
  b.sched.policy = second;
  CompareReport rep;
  rep.ts_run = run(a);
  rep.fs_run = run(b);
  for (std::size_t i = 0; i < rep.ts_run.users.size(); ++i) {
    const auto& ua = rep.ts_run.users[i];
    const auto& ub = rep.fs_run.users[i];
    CompareRow row;
    row.user = ua.user;
    row.group = ua.group;
    row.resp_ts_ms = ua.resp_mean_ms;
    row.resp_fs_ms = ub.resp_mean_ms;
    row.degradation = ua.resp_mean_ms > 0 ? ub.resp_mean_ms / ua.resp_mean_ms
                                          : std::numeric_limits<double>::quiet_NaN();
    row.util_ts = ua.utilization;
    row.util_fs = ub.utilization;
    rep.rows.push_back(row);
  }
  return rep;
}

CompareReport compare_policies(const Scenario& s) {
  return compare_policies(s, Policy::ts, Policy::fs);
}

}  // namespace sharesim
