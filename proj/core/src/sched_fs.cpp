#include "sharesim/sched_fs.hpp"

namespace sharesim {

FsScheduler::FsScheduler(const FsParams& p, std::int64_t tick_ms, bool capping_enabled)
    : p_(p),
      tick_ms_(tick_ms),
      capping_(capping_enabled),
      window_ticks_(p.usage_window_ms / tick_ms) {}

int FsScheduler::add_user(std::int64_t shares, std::optional<double> cap) {
  shares_.push_back(shares);
  cap_.push_back(cap ? *cap : -1.0);
  usage_.push_back(0.0);
  cost_.push_back(0.0);
  p_active_.push_back(0);
  busy_ring_.emplace_back(capping_ ? static_cast<std::size_t>(window_ticks_) : 0, 0);
  ring_sum_.push_back(0);
  return static_cast<int>(shares_.size()) - 1;
}

int FsScheduler::add_process(int user, int nice) {
  owner_.push_back(user);
  nice_.push_back(nice);
  sharepri_.push_back(0.0);
  state_.push_back(St::blocked);
  seq_.push_back(0);
  return static_cast<int>(owner_.size()) - 1;
}

void FsScheduler::on_ready(int pid, std::uint64_t seq) {
  if (state_[pid] == St::blocked) ++p_active_[owner_[pid]];
  state_[pid] = St::ready;
  seq_[pid] = seq;
}

void FsScheduler::set_running(int pid) { state_[pid] = St::running; }

void FsScheduler::on_preempt(int pid, std::uint64_t seq) {
  state_[pid] = St::ready;
  seq_[pid] = seq;
}

void FsScheduler::on_block(int pid) {
  if (state_[pid] != St::blocked) --p_active_[owner_[pid]];
  state_[pid] = St::blocked;
}

void FsScheduler::charge_tick(int pid) {
  const int u = owner_[pid];
  cost_[u] += static_cast<double>(tick_ms_) / static_cast<double>(shares_[u]);
}

void FsScheduler::cap_tick(int running_user_or_none) {
  if (!capping_) return;
  for (int u = 0; u < user_count(); ++u) {
    auto& ring = busy_ring_[u];
    const char now = (u == running_user_or_none) ? 1 : 0;
    ring_sum_[u] += now - ring[static_cast<std::size_t>(ring_pos_)];
    ring[static_cast<std::size_t>(ring_pos_)] = now;
  }
  ring_pos_ = (ring_pos_ + 1) % window_ticks_;
  ++elapsed_ticks_;
}

bool FsScheduler::user_throttled(int user) const {
  if (!capping_ || cap_[user] < 0.0 || elapsed_ticks_ == 0) return false;
  const auto denom = std::min(elapsed_ticks_, window_ticks_);
  return static_cast<double>(ring_sum_[user]) > cap_[user] * static_cast<double>(denom);
}

void FsScheduler::decay_usage() {
  for (int u = 0; u < user_count(); ++u) {
    usage_[u] = usage_[u] * p_.decay_usage + cost_[u];
    cost_[u] = 0.0;
  }
}

void FsScheduler::decay_sharepri() {
  for (std::size_t k = 0; k < sharepri_.size(); ++k)
    sharepri_[k] *= p_.pri_a * nice_[k] + p_.pri_b;
}

void FsScheduler::tick_adjust() {
  // Per-user pressure term, then one pass over the processes.
  static thread_local std::vector<double> pressure;
  pressure.assign(usage_.size(), 0.0);
  for (int u = 0; u < user_count(); ++u)
    pressure[u] = (usage_[u] + cost_[u]) * static_cast<double>(p_active_[u]);
  for (std::size_t k = 0; k < sharepri_.size(); ++k)
    if (state_[k] != St::blocked) sharepri_[k] += pressure[static_cast<std::size_t>(owner_[k])];
}

int FsScheduler::select_next() const {
  int best = -1;
  for (int pid = 0; pid < static_cast<int>(owner_.size()); ++pid) {
    if (state_[pid] != St::ready) continue;
    if (user_throttled(owner_[pid])) continue;
    if (best < 0 || sharepri_[pid] < sharepri_[best] ||
        (sharepri_[pid] == sharepri_[best] && seq_[pid] < seq_[best]))
      best = pid;
  }
  return best;
}

}  // namespace sharesim
