#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sharesim {

using UserId = std::string;
using GroupId = std::string;

enum class Policy { ts, fs };
enum class Dist { fixed, exponential };

// Time-share discipline constants. Priority is recomputed per tick as
// cpu_weight * recent_cpu + nice_weight * nice, clamped to [0, levels-1];
// lower wins. recent_cpu decays by decay_per_s once per second.
struct TsParams {
  int levels = 60;
  double cpu_weight = 0.5;
  double decay_per_s = 0.5;
  double nice_weight = 1.0;
  bool operator==(const TsParams&) const = default;
};

// Fair-share discipline constants. Per-user usage folds in the window's
// cost every usage_window_ms; per-process sharepri decays every
// pri_window_ms by (pri_a * nice + pri_b).
struct FsParams {
  std::int64_t usage_window_ms = 4000;
  std::int64_t pri_window_ms = 1000;
  double decay_usage = 0.5;
  double pri_a = 0.01;
  double pri_b = 0.5;
  bool operator==(const FsParams&) const = default;
};

struct SchedulerConfig {
  Policy policy = Policy::ts;
  std::int64_t quantum_ms = 10;
  std::int64_t tick_ms = 10;
  TsParams ts;
  FsParams fs;
  bool operator==(const SchedulerConfig&) const = default;
};

struct UserAlloc {
  UserId user;
  GroupId group;
  std::int64_t shares = 0;
  std::optional<double> cap;  // fraction in (0,1]
  bool operator==(const UserAlloc&) const = default;
};

struct GroupAlloc {
  GroupId group;
  std::int64_t shares = 0;
  bool operator==(const GroupAlloc&) const = default;
};

// Two-level share tree: groups partition the pool, users partition their
// group. Users collapse to a flat share vector for scheduling.
struct ShareAllocation {
  std::int64_t pool_total = 0;
  std::vector<GroupAlloc> groups;
  std::vector<UserAlloc> users;
  bool capping_enabled = false;
  bool operator==(const ShareAllocation&) const = default;

  const UserAlloc* find_user(const UserId& u) const;
  const GroupAlloc* find_group(const GroupId& g) const;
};

// Closed interactive workload for one user: n processes looping
// think -> demand forever.
struct UserWorkload {
  int processes = 0;
  double demand_ms = 0.0;
  double think_ms = 0.0;
  Dist demand_dist = Dist::fixed;
  Dist think_dist = Dist::fixed;
  int nice = 0;
  bool operator==(const UserWorkload&) const = default;
};

struct WorkloadSpec {
  std::vector<std::pair<UserId, UserWorkload>> by_user;  // declaration order
  bool operator==(const WorkloadSpec&) const = default;

  const UserWorkload* find(const UserId& u) const;
};

struct SimConfig {
  std::int64_t duration_ms = 0;
  std::int64_t warmup_ms = 0;
  std::uint64_t seed = 0;
  std::int64_t metrics_window_ms = 1000;
  std::string label;
  bool operator==(const SimConfig&) const = default;
};

struct Scenario {
  ShareAllocation alloc;
  WorkloadSpec workload;
  SchedulerConfig sched;
  SimConfig sim;
  bool operator==(const Scenario&) const = default;
};

struct Violation {
  std::string code;     // stable machine-readable id
  std::string message;  // human-readable detail
  bool operator==(const Violation&) const = default;
};

// Total: never throws; every malformed field yields at least one violation.
std::vector<Violation> validate_scenario(const Scenario& s);
// Allocation-only subset, used by the entitlement functions.
std::vector<Violation> validate_allocation(const ShareAllocation& a);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> v);
  ValidationError(std::string code, std::string message);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, const std::string& what);
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_ = 0;
};

class PlannerError : public std::runtime_error {
 public:
  PlannerError(const std::string& what, double residual, int iterations);
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_ = 0.0;
  int iterations_ = 0;
};

}  // namespace sharesim
