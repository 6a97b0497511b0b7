#pragma once

#include <vector>

#include "sharesim/types.hpp"

namespace sharesim {

struct EntitlementRow {
  UserId user;
  GroupId group;
  std::int64_t shares = 0;
  double static_e = 0.0;     // shares / pool_total
  double dynamic_e = 0.0;    // shares / active shares, 0 if inactive
  double effective_e = 0.0;  // min(dynamic_e, cap) under capping
  bool active = true;
  bool operator==(const EntitlementRow&) const = default;
};

struct EntitlementTable {
  std::vector<EntitlementRow> rows;                      // user declaration order
  std::vector<std::pair<GroupId, double>> group_static;  // group declaration order
  bool operator==(const EntitlementTable&) const = default;

  const EntitlementRow* find(const UserId& u) const;
};

// All three functions throw ValidationError for a malformed allocation.
// The active-set variants additionally reject an empty or unknown active
// set ("no active shares").

EntitlementTable static_entitlements(const ShareAllocation& alloc);

// dynamic_e(u) = shares(u) / sum of active shares; inactive users get 0.
EntitlementTable dynamic_entitlements(const ShareAllocation& alloc,
                                      const std::vector<UserId>& active);

// Cap clamp on top of dynamic entitlements. Capped-off surplus is idle
// capacity, never redistributed.
EntitlementTable effective_entitlements(const ShareAllocation& alloc,
                                        const std::vector<UserId>& active);

}  // namespace sharesim
