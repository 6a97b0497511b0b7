#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sharesim/types.hpp"

namespace sharesim {

struct MetricRecord {
  std::string entity;  // user or group id
  bool is_group = false;
  std::int64_t window_start_ms = 0;
  std::int64_t window_end_ms = 0;
  std::int64_t busy_ms = 0;
  std::int64_t transactions = 0;
  double resp_sum_ms = 0.0;
  std::vector<double> resp_samples;  // first completions in the window, capped
  bool operator==(const MetricRecord&) const = default;
};

struct UserReport {
  UserId user;
  GroupId group;
  int processes = 0;
  std::int64_t shares = 0;
  double entitlement_static = 0.0;
  double entitlement_dynamic = 0.0;  // over users with processes > 0
  // Measured window (after warmup):
  std::int64_t busy_ms = 0;
  std::int64_t transactions = 0;
  double utilization = 0.0;
  double tps = 0.0;
  double work_tput_ms_per_s = 0.0;
  double resp_mean_ms = 0.0;
  double resp_p95_ms = 0.0;
  double avg_in_service = 0.0;  // time-averaged ready+running census
  // Whole-run diagnostics:
  std::int64_t preemptions = 0;
  std::int64_t max_ready_wait_ms = 0;
  std::int64_t busy_ms_total = 0;
  std::int64_t completed_demand_ms = 0;
  std::int64_t inflight_demand_ms = 0;
  bool operator==(const UserReport&) const = default;
};

struct GroupReport {
  GroupId group;
  std::int64_t busy_ms = 0;
  std::int64_t transactions = 0;
  double utilization = 0.0;
  double tps = 0.0;
  double work_tput_ms_per_s = 0.0;
  double resp_mean_ms = 0.0;
  double resp_p95_ms = 0.0;
  bool operator==(const GroupReport&) const = default;
};

struct SimReport {
  std::string scenario_label;
  Policy policy = Policy::ts;
  std::uint64_t seed = 0;
  std::int64_t duration_ms = 0;
  std::int64_t warmup_ms = 0;
  std::int64_t measured_ms = 0;
  std::vector<UserReport> users;    // allocation declaration order
  std::vector<GroupReport> groups;  // group declaration order
  double total_utilization = 0.0;
  std::int64_t busy_ms = 0;  // measured
  std::int64_t idle_ms = 0;  // measured
  std::int64_t max_ready_wait_ms = 0;
  std::vector<MetricRecord> windows;  // full run, warmup included
  bool operator==(const SimReport&) const = default;

  const UserReport* find(const UserId& u) const;
};

// Per usage-window fair-share accounting snapshot, taken just before the
// usage decay is applied.
struct FsTraceRow {
  std::int64_t window_end_ms = 0;
  UserId user;
  double usage = 0.0;
  double cost = 0.0;
  int p_active = 0;
};

// Simulates the scenario tick by tick. Throws ValidationError when the
// scenario is invalid. Identical scenarios (seed included) produce
// identical reports, field for field.
SimReport run(const Scenario& s);
SimReport run(const Scenario& s, std::vector<FsTraceRow>* fs_trace);

// One run per per-user process count in [n_lo, n_hi]; every user with a
// workload entry is set to N processes. Reports come back in N order
// regardless of job count.
std::vector<SimReport> sweep(const Scenario& s, int n_lo, int n_hi, int jobs = 1);

struct CompareRow {
  UserId user;
  GroupId group;
  double resp_ts_ms = 0.0;
  double resp_fs_ms = 0.0;
  double degradation = 0.0;  // resp_fs / resp_ts
  double util_ts = 0.0;
  double util_fs = 0.0;
};

struct CompareReport {
  SimReport ts_run;
  SimReport fs_run;
  std::vector<CompareRow> rows;
};

// Same workload under both policies; degradation(u) = resp_fs/resp_ts.
CompareReport compare_policies(const Scenario& s);
// Explicit-policy variant (the first report fills the ts slot, the second
// the fs slot); comparing a policy against itself yields degradation 1.
CompareReport compare_policies(const Scenario& s, Policy first, Policy second);

}  // namespace sharesim
