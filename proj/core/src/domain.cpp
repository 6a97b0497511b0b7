#include "sharesim/types.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

namespace sharesim {

const UserAlloc* ShareAllocation::find_user(const UserId& u) const {
  for (const auto& ua : users)
    if (ua.user == u) return &ua;
  return nullptr;
}

const GroupAlloc* ShareAllocation::find_group(const GroupId& g) const {
  for (const auto& ga : groups)
    if (ga.group == g) return &ga;
  return nullptr;
}

const UserWorkload* WorkloadSpec::find(const UserId& u) const {
  for (const auto& [id, wl] : by_user)
    if (id == u) return &wl;
  return nullptr;
}

namespace {

bool valid_id(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_id(std::vector<Violation>& out, const std::string& kind, const std::string& s) {
  if (!valid_id(s))
    out.push_back({"id.invalid", kind + " id '" + s + "' must be non-empty alphanumeric/_/-"});
}

}  // namespace

std::vector<Violation> validate_allocation(const ShareAllocation& a) {
  std::vector<Violation> out;
  if (a.pool_total <= 0)
    out.push_back({"pool.total_nonpositive",
                   "pool total must be a positive share count, got " + std::to_string(a.pool_total)});

  std::set<GroupId> group_names;
  std::int64_t group_sum = 0;
  for (const auto& g : a.groups) {
    check_id(out, "group", g.group);
    if (!group_names.insert(g.group).second)
      out.push_back({"alloc.duplicate_group", "group '" + g.group + "' declared twice"});
    if (g.shares <= 0)
      out.push_back({"group.shares_nonpositive",
                     "group '" + g.group + "' shares must be positive, got " + std::to_string(g.shares)});
    group_sum += g.shares;
  }
  if (a.pool_total > 0 && group_sum != a.pool_total)
    out.push_back({"alloc.group_sum_mismatch",
                   "group shares sum " + std::to_string(group_sum) + " != pool " +
                       std::to_string(a.pool_total)});

  std::set<UserId> user_names;
  for (const auto& u : a.users) {
    check_id(out, "user", u.user);
    if (!user_names.insert(u.user).second)
      out.push_back({"alloc.duplicate_user", "user '" + u.user + "' declared twice"});
    if (!a.find_group(u.group))
      out.push_back({"user.unknown_group",
                     "user '" + u.user + "' references undeclared group '" + u.group + "'"});
    if (u.shares <= 0)
      out.push_back({"user.shares_nonpositive",
                     "user '" + u.user + "' shares must be positive, got " + std::to_string(u.shares)});
    if (u.cap && (*u.cap <= 0.0 || *u.cap > 1.0))
      out.push_back({"user.cap_range",
                     "user '" + u.user + "' cap " + num(*u.cap) + " out of (0,1]"});
  }
  for (const auto& g : a.groups) {
    std::int64_t sum = 0;
    for (const auto& u : a.users)
      if (u.group == g.group) sum += u.shares;
    if (sum != g.shares)
      out.push_back({"alloc.user_sum_mismatch",
                     "users of group '" + g.group + "' hold " + std::to_string(sum) +
                         " shares, group declares " + std::to_string(g.shares)});
  }
  return out;
}

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out = validate_allocation(s.alloc);

  std::set<UserId> wl_seen;
  for (const auto& [user, wl] : s.workload.by_user) {
    if (!wl_seen.insert(user).second)
      out.push_back({"workload.duplicate", "workload for '" + user + "' declared twice"});
    if (!s.alloc.find_user(user))
      out.push_back({"workload.unknown_user",
                     "workload references undeclared user '" + user + "'"});
    if (wl.processes < 0)
      out.push_back({"workload.processes_negative",
                     "user '" + user + "' processes must be >= 0, got " + std::to_string(wl.processes)});
    if (!(wl.demand_ms > 0.0))
      out.push_back({"workload.demand_nonpositive",
                     "user '" + user + "' demand_ms must be > 0, got " + num(wl.demand_ms)});
    if (wl.think_ms < 0.0)
      out.push_back({"workload.think_negative",
                     "user '" + user + "' think_ms must be >= 0, got " + num(wl.think_ms)});
    if (wl.nice < -19 || wl.nice > 19)
      out.push_back({"workload.nice_range",
                     "user '" + user + "' nice " + std::to_string(wl.nice) + " out of [-19,19]"});
  }

  const auto& sc = s.sched;
  if (sc.tick_ms <= 0)
    out.push_back({"sched.tick_nonpositive", "tick_ms must be positive"});
  if (sc.quantum_ms <= 0 || (sc.tick_ms > 0 && sc.quantum_ms % sc.tick_ms != 0))
    out.push_back({"sched.quantum_not_multiple",
                   "quantum_ms " + std::to_string(sc.quantum_ms) +
                       " must be a positive multiple of tick_ms " + std::to_string(sc.tick_ms)});
  if (sc.ts.levels < 2)
    out.push_back({"sched.ts_levels", "ts_levels must be >= 2"});
  if (sc.ts.decay_per_s < 0.0 || sc.ts.decay_per_s >= 1.0)
    out.push_back({"sched.ts_decay_range", "ts_decay_per_s must lie in [0,1)"});
  if (sc.tick_ms > 0 && 1000 % sc.tick_ms != 0)
    out.push_back({"sched.tick_second_multiple",
                   "tick_ms must divide 1000 so once-per-second decay lands on a tick"});
  if (sc.fs.usage_window_ms <= 0 || (sc.tick_ms > 0 && sc.fs.usage_window_ms % sc.tick_ms != 0))
    out.push_back({"sched.fs_usage_window",
                   "fs_usage_window_ms must be a positive multiple of tick_ms"});
  if (sc.fs.pri_window_ms <= 0 || (sc.tick_ms > 0 && sc.fs.pri_window_ms % sc.tick_ms != 0))
    out.push_back({"sched.fs_pri_window",
                   "fs_pri_window_ms must be a positive multiple of tick_ms"});
  if (sc.fs.decay_usage < 0.0 || sc.fs.decay_usage >= 1.0)
    out.push_back({"sched.fs_decay_range", "fs_decay_usage must lie in [0,1)"});
  // priDecay = a*nice + b must stay in [0,1] across nice in [-19,19].
  const double lo = sc.fs.pri_a * -19.0 + sc.fs.pri_b;
  const double hi = sc.fs.pri_a * 19.0 + sc.fs.pri_b;
  if (std::min(lo, hi) < 0.0 || std::max(lo, hi) > 1.0)
    out.push_back({"sched.fs_pri_decay_range",
                   "pri_a*nice + pri_b leaves [0,1] over nice in [-19,19] (got [" + num(std::min(lo, hi)) +
                       "," + num(std::max(lo, hi)) + "])"});

  const auto& sim = s.sim;
  if (sim.warmup_ms < 0)
    out.push_back({"sim.warmup_negative", "warmup_ms must be >= 0"});
  if (sim.duration_ms <= sim.warmup_ms)
    out.push_back({"sim.duration_le_warmup",
                   "duration_ms " + std::to_string(sim.duration_ms) +
                       " must exceed warmup_ms " + std::to_string(sim.warmup_ms)});
  if (sim.duration_ms > 1'000'000'000'000LL)
    out.push_back({"sim.duration_too_large", "duration_ms above 1e12 is not supported"});
  if (sc.tick_ms > 0) {
    if (sim.duration_ms % sc.tick_ms != 0)
      out.push_back({"sim.duration_not_tick_multiple", "duration_ms must be a multiple of tick_ms"});
    if (sim.warmup_ms % sc.tick_ms != 0)
      out.push_back({"sim.warmup_not_tick_multiple", "warmup_ms must be a multiple of tick_ms"});
  }
  if (sim.metrics_window_ms <= 0 || (sc.tick_ms > 0 && sim.metrics_window_ms % sc.tick_ms != 0))
    out.push_back({"sim.metrics_window", "metrics_window_ms must be a positive multiple of tick_ms"});

  return out;
}

namespace {
std::string join_violations(const std::vector<Violation>& v) {
  std::ostringstream os;
  os << "scenario validation failed (" << v.size() << " violation" << (v.size() == 1 ? "" : "s") << ")";
  for (const auto& x : v) os << "\n  " << x.code << ": " << x.message;
  return os.str();
}
}  // namespace

ValidationError::ValidationError(std::vector<Violation> v)
    : std::runtime_error(join_violations(v)), violations_(std::move(v)) {}

ValidationError::ValidationError(std::string code, std::string message)
    : ValidationError(std::vector<Violation>{{std::move(code), std::move(message)}}) {}

ParseError::ParseError(std::string file, int line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
      file_(std::move(file)),
      line_(line) {}

PlannerError::PlannerError(const std::string& what, double residual, int iterations)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                         std::to_string(iterations) + " iterations)"),
      residual_(residual),
      iterations_(iterations) {}

}  // namespace sharesim
