#include "sharesim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sharesim/entitlements.hpp"

namespace sharesim {

const PlanRow* PlanReport::find(const UserId& u) const {
  for (const auto& r : rows)
    if (r.user == u) return &r;
  return nullptr;
}

namespace {

struct MvaResult {
  double util = 0.0;
  double resp_ms = 0.0;
  double tps = 0.0;
};

// Exact mean-value recursion for one closed class of n customers with demand
// d_ms against a server of capacity c, think time z_ms.
MvaResult mva(int n, double d_ms, double z_ms, double c) {
  MvaResult r;
  double q = 0.0;
  double x = 0.0, resp = 0.0;
  for (int k = 1; k <= n; ++k) {
    resp = (d_ms / c) * (1.0 + q);
    x = static_cast<double>(k) / (resp + z_ms);
    q = x * resp;
  }
  r.util = x * d_ms;
  r.resp_ms = resp;
  r.tps = x * 1000.0;
  return r;
}

constexpr double kTol = 1e-6;
constexpr int kMaxIters = 10'000;

}  // namespace

PlanReport predict(const Scenario& s, const std::vector<UserId>& active) {
  auto violations = validate_scenario(s);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  if (active.empty()) throw ValidationError("plan.active_empty", "active set is empty");

  // effective_entitlements also rejects unknown or duplicate active users
  const EntitlementTable ent = effective_entitlements(s.alloc, active);

  const int nusers = static_cast<int>(s.alloc.users.size());
  std::vector<int> nprocs(static_cast<std::size_t>(nusers), 0);
  std::vector<double> demand(static_cast<std::size_t>(nusers), 0.0);
  std::vector<double> think(static_cast<std::size_t>(nusers), 0.0);
  std::vector<char> is_active(static_cast<std::size_t>(nusers), 0);
  for (int u = 0; u < nusers; ++u) {
    const auto& ua = s.alloc.users[static_cast<std::size_t>(u)];
    if (std::find(active.begin(), active.end(), ua.user) == active.end()) continue;
    const auto* wl = s.workload.find(ua.user);
    if (!wl || wl->processes <= 0)
      throw ValidationError("plan.active_no_workload",
                            "active user '" + ua.user + "' has no processes");
    is_active[static_cast<std::size_t>(u)] = 1;
    nprocs[static_cast<std::size_t>(u)] = wl->processes;
    demand[static_cast<std::size_t>(u)] = wl->demand_ms;
    think[static_cast<std::size_t>(u)] = wl->think_ms;
  }

  double active_shares = 0.0;
  for (int u = 0; u < nusers; ++u)
    if (is_active[static_cast<std::size_t>(u)]) active_shares += s.alloc.users[static_cast<std::size_t>(u)].shares;

  std::vector<double> ecap(static_cast<std::size_t>(nusers), 1.0);
  std::vector<double> ebase(static_cast<std::size_t>(nusers), 0.0);
  std::vector<double> cap_frac(static_cast<std::size_t>(nusers), 1.0);
  for (int u = 0; u < nusers; ++u) {
    if (!is_active[static_cast<std::size_t>(u)]) continue;
    const auto& ua = s.alloc.users[static_cast<std::size_t>(u)];
    const auto* row = ent.find(ua.user);
    ebase[static_cast<std::size_t>(u)] = row->effective_e;
    if (s.alloc.capping_enabled && ua.cap) cap_frac[static_cast<std::size_t>(u)] = *ua.cap;
  }

  std::vector<double> cap(ebase);  // capacities start at the entitlements
  std::vector<MvaResult> res(static_cast<std::size_t>(nusers));
  int iters = 0;
  double residual = std::numeric_limits<double>::infinity();
  std::vector<double> prev_util(static_cast<std::size_t>(nusers), 0.0);

  while (iters < kMaxIters) {
    ++iters;
    double total = 0.0;
    for (int u = 0; u < nusers; ++u) {
      if (!is_active[static_cast<std::size_t>(u)]) continue;
      res[static_cast<std::size_t>(u)] = mva(nprocs[static_cast<std::size_t>(u)],
                                             demand[static_cast<std::size_t>(u)],
                                             think[static_cast<std::size_t>(u)],
                                             cap[static_cast<std::size_t>(u)]);
      total += res[static_cast<std::size_t>(u)].util;
    }
    const double surplus = std::max(0.0, 1.0 - total);
    residual = 0.0;
    for (int u = 0; u < nusers; ++u) {
      if (!is_active[static_cast<std::size_t>(u)]) continue;
      const double share_frac =
          s.alloc.users[static_cast<std::size_t>(u)].shares / active_shares;
      double target = ebase[static_cast<std::size_t>(u)] + surplus * share_frac;
      target = std::min({target, cap_frac[static_cast<std::size_t>(u)], 1.0});
      const double next = 0.5 * (cap[static_cast<std::size_t>(u)] + target);  // damped
      residual = std::max(residual, std::abs(next - cap[static_cast<std::size_t>(u)]));
      residual = std::max(residual, std::abs(res[static_cast<std::size_t>(u)].util -
                                             prev_util[static_cast<std::size_t>(u)]));
      prev_util[static_cast<std::size_t>(u)] = res[static_cast<std::size_t>(u)].util;
      cap[static_cast<std::size_t>(u)] = next;
    }
    if (residual < kTol) break;
  }
  if (residual >= kTol) throw PlannerError("planner failed to converge", residual, iters);

  // one last evaluation so the reported utilization matches the final capacities
  for (int u = 0; u < nusers; ++u)
    if (is_active[static_cast<std::size_t>(u)])
      res[static_cast<std::size_t>(u)] = mva(nprocs[static_cast<std::size_t>(u)],
                                             demand[static_cast<std::size_t>(u)],
                                             think[static_cast<std::size_t>(u)],
                                             cap[static_cast<std::size_t>(u)]);

  PlanReport rep;
  rep.scenario_label = s.sim.label;
  rep.iterations = iters;
  rep.residual = residual;
  for (int u = 0; u < nusers; ++u) {
    const auto& ua = s.alloc.users[static_cast<std::size_t>(u)];
    PlanRow row;
    row.user = ua.user;
    row.group = ua.group;
    row.shares = ua.shares;
    row.processes = nprocs[static_cast<std::size_t>(u)];
    row.active = is_active[static_cast<std::size_t>(u)] != 0;
    if (row.active) {
      row.entitlement = ebase[static_cast<std::size_t>(u)];
      row.capacity = cap[static_cast<std::size_t>(u)];
      row.utilization = res[static_cast<std::size_t>(u)].util;
      row.resp_mean_ms = res[static_cast<std::size_t>(u)].resp_ms;
      row.tps = res[static_cast<std::size_t>(u)].tps;
      rep.total_utilization += row.utilization;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

PlanReport predict(const Scenario& s) {
  std::vector<UserId> active;
  for (const auto& ua : s.alloc.users) {
    const auto* wl = s.workload.find(ua.user);
    if (wl && wl->processes > 0) active.push_back(ua.user);
  }
  return predict(s, active);
}

WhatIfReport what_if(const Scenario& s, const std::vector<std::vector<UserId>>& active_sets) {
  if (active_sets.empty()) throw ValidationError("whatif.empty", "no hypotheses");
  WhatIfReport rep;
  rep.reports.reserve(active_sets.size());
  for (const auto& set : active_sets) rep.reports.push_back(predict(s, set));
  const auto& base = rep.reports.front();
  for (std::size_t h = 1; h < rep.reports.size(); ++h) {
    const auto& hyp = rep.reports[h];
    std::vector<WhatIfDelta> table;
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
      const auto& b = base.rows[i];
      const auto& x = hyp.rows[i];
      WhatIfDelta d;
      d.user = b.user;
      d.d_entitlement = x.entitlement - b.entitlement;
      d.d_utilization = x.utilization - b.utilization;
      d.d_resp_mean_ms = x.resp_mean_ms - b.resp_mean_ms;
      d.d_tps = x.tps - b.tps;
      d.resp_ratio = b.resp_mean_ms > 0.0 ? x.resp_mean_ms / b.resp_mean_ms
                                          : std::numeric_limits<double>::quiet_NaN();
      table.push_back(std::move(d));
    }
    rep.deltas.push_back(std::move(table));
  }
  return rep;
}

SuggestReport suggest_shares(const std::vector<std::pair<UserId, double>>& measured,
                             std::int64_t pool,
                             const std::vector<std::pair<UserId, double>>& resp_max) {
  if (measured.empty()) throw ValidationError("suggest.empty", "no measurements");
  if (pool < static_cast<std::int64_t>(measured.size()))
    throw ValidationError("suggest.pool_too_small", "pool smaller than the user count");
  double total = 0.0;
  for (const auto& [user, frac] : measured) {
    if (frac < 0.0)
      throw ValidationError("suggest.negative_measure", "negative measurement for '" + user + "'");
    total += frac;
  }
  if (total <= 0.0)
    throw ValidationError("suggest.all_zero", "all measured utilizations are zero");

  const int n = static_cast<int>(measured.size());
  std::vector<std::int64_t> shares(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    shares[static_cast<std::size_t>(i)] =
        std::llround(static_cast<double>(pool) * measured[static_cast<std::size_t>(i)].second / total);
    shares[static_cast<std::size_t>(i)] = std::max<std::int64_t>(1, shares[static_cast<std::size_t>(i)]);
  }

  // largest consumers first, earlier-listed users winning ties
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return measured[static_cast<std::size_t>(a)].second > measured[static_cast<std::size_t>(b)].second;
  });

  std::int64_t residue = pool - std::accumulate(shares.begin(), shares.end(), std::int64_t{0});
  if (residue > 0) {
    shares[static_cast<std::size_t>(order.front())] += residue;
  } else {
    for (std::size_t k = 0; residue < 0; k = (k + 1) % order.size()) {
      auto& sh = shares[static_cast<std::size_t>(order[k])];
      const std::int64_t take = std::min(-residue, sh - 1);
      sh -= take;
      residue += take;
    }
  }

  SuggestReport rep;
  rep.pool = pool;
  rep.pointless_precision = pool > 1000;
  rep.allocation.pool_total = pool;
  rep.allocation.capping_enabled = false;
  rep.allocation.groups.push_back({"all", pool});
  for (int i = 0; i < n; ++i) {
    SuggestRow row;
    row.user = measured[static_cast<std::size_t>(i)].first;
    row.measured = measured[static_cast<std::size_t>(i)].second;
    row.shares = static_cast<int>(shares[static_cast<std::size_t>(i)]);
    row.implied_entitlement = static_cast<double>(row.shares) / static_cast<double>(pool);
    for (const auto& [user, worst] : resp_max) {
      (void)worst;
      if (user == row.user && row.implied_entitlement > row.measured + 1e-12)
        row.wiggle_flag = true;
    }
    rep.allocation.users.push_back({row.user, "all", row.shares, std::nullopt});
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace sharesim
