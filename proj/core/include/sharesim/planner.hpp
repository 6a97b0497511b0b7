#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sharesim/types.hpp"

namespace sharesim {

// Analytic look-ahead. Each active user is modelled as a closed interactive
// class (N processes, demand D, think Z) served at a capacity fraction of the
// CPU. Capacities start at the effective entitlements and surplus left by
// classes that demand less than their entitlement is water-filled back,
// proportional to shares, so the model reduces to plain entitlements at full
// saturation. The simulator stays the truth source; this is the fast estimate.

struct PlanRow {
  UserId user;
  GroupId group;
  double shares = 0.0;
  int processes = 0;
  bool active = false;
  double entitlement = 0.0;  // effective entitlement used by the model
  double capacity = 0.0;     // converged service capacity fraction
  double utilization = 0.0;
  double resp_mean_ms = 0.0;
  double tps = 0.0;

  bool operator==(const PlanRow&) const = default;
};

struct PlanReport {
  std::string scenario_label;
  std::vector<PlanRow> rows;  // allocation order, inactive users included with zeros
  double total_utilization = 0.0;
  int iterations = 0;
  double residual = 0.0;

  const PlanRow* find(const UserId& u) const;
};

// Predicts utilization/response/throughput for the given active set.
// The single-argument form treats every user with processes > 0 as active.
// Throws ValidationError for bad input and PlannerError when the fixed
// point fails to converge within 10,000 iterations (tolerance 1e-6).
PlanReport predict(const Scenario& s);
PlanReport predict(const Scenario& s, const std::vector<UserId>& active);

struct WhatIfDelta {
  UserId user;
  double d_entitlement = 0.0;
  double d_utilization = 0.0;
  double d_resp_mean_ms = 0.0;
  double d_tps = 0.0;
  double resp_ratio = 1.0;  // hypothesis / baseline, NaN when baseline resp is 0

  bool operator==(const WhatIfDelta&) const = default;
};

struct WhatIfReport {
  std::vector<PlanReport> reports;              // [0] is the baseline
  std::vector<std::vector<WhatIfDelta>> deltas;  // one table per non-baseline set
};

// One prediction per active set; deltas are taken against the first set.
WhatIfReport what_if(const Scenario& s, const std::vector<std::vector<UserId>>& active_sets);

struct SuggestRow {
  UserId user;
  double measured = 0.0;  // observed CPU fraction
  int shares = 0;
  double implied_entitlement = 0.0;  // shares / pool
  bool wiggle_flag = false;  // entitlement promises more than the measured fraction

  bool operator==(const SuggestRow&) const = default;
};

struct SuggestReport {
  std::vector<SuggestRow> rows;  // input order
  std::int64_t pool = 0;
  bool pointless_precision = false;  // pool so large the accuracy can't back it
  ShareAllocation allocation;        // single group holding every user
};

// Turns measured per-user CPU fractions into a share allocation over `pool`.
// Every user gets at least one share; the rounding residue goes to the
// largest consumer (earlier-listed users win ties). When `resp_max` names a
// user, the row is flagged if the implied entitlement exceeds the measured
// fraction — the allocation promises more than was demonstrated.
SuggestReport suggest_shares(const std::vector<std::pair<UserId, double>>& measured,
                             std::int64_t pool,
                             const std::vector<std::pair<UserId, double>>& resp_max = {});

}  // namespace sharesim
