#include "sharesim/entitlements.hpp"

#include <algorithm>
#include <set>

namespace sharesim {

const EntitlementRow* EntitlementTable::find(const UserId& u) const {
  for (const auto& r : rows)
    if (r.user == u) return &r;
  return nullptr;
}

namespace {

void require_valid(const ShareAllocation& alloc) {
  auto v = validate_allocation(alloc);
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::set<UserId> check_active(const ShareAllocation& alloc, const std::vector<UserId>& active) {
  if (active.empty()) throw ValidationError("active.empty", "no active shares");
  std::set<UserId> set;
  for (const auto& u : active) {
    if (!alloc.find_user(u))
      throw ValidationError("active.unknown_user", "active user '" + u + "' not in allocation");
    set.insert(u);
  }
  return set;
}

EntitlementTable base_table(const ShareAllocation& alloc) {
  EntitlementTable t;
  const double pool = static_cast<double>(alloc.pool_total);
  for (const auto& u : alloc.users) {
    EntitlementRow r;
    r.user = u.user;
    r.group = u.group;
    r.shares = u.shares;
    r.static_e = static_cast<double>(u.shares) / pool;
    t.rows.push_back(std::move(r));
  }
  for (const auto& g : alloc.groups)
    t.group_static.emplace_back(g.group, static_cast<double>(g.shares) / pool);
  return t;
}

}  // namespace

EntitlementTable static_entitlements(const ShareAllocation& alloc) {
  require_valid(alloc);
  EntitlementTable t = base_table(alloc);
  for (auto& r : t.rows) {
    r.dynamic_e = r.static_e;  // all-active view
    r.effective_e = r.static_e;
    r.active = true;
  }
  return t;
}

EntitlementTable dynamic_entitlements(const ShareAllocation& alloc,
                                      const std::vector<UserId>& active) {
  require_valid(alloc);
  auto act = check_active(alloc, active);
  EntitlementTable t = base_table(alloc);
  std::int64_t active_shares = 0;
  for (const auto& u : alloc.users)
    if (act.count(u.user)) active_shares += u.shares;
  for (auto& r : t.rows) {
    r.active = act.count(r.user) > 0;
    r.dynamic_e = r.active ? static_cast<double>(r.shares) / static_cast<double>(active_shares) : 0.0;
    r.effective_e = r.dynamic_e;
  }
  return t;
}

EntitlementTable effective_entitlements(const ShareAllocation& alloc,
                                        const std::vector<UserId>& active) {
  EntitlementTable t = dynamic_entitlements(alloc, active);
  if (!alloc.capping_enabled) return t;
  for (auto& r : t.rows) {
    const UserAlloc* u = alloc.find_user(r.user);
    if (u->cap) r.effective_e = std::min(r.dynamic_e, *u->cap);
  }
  return t;
}

}  // namespace sharesim
