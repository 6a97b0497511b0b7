#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sharesim/types.hpp"

namespace sharesim {

// Two-level fair-share discipline. User level: normalized cost accrues per
// tick and folds into a decayed usage figure every usage window. Process
// level: sharepri decays every pri window and, each tick, every ready or
// running process is penalized by its owner's usage (including the cost
// accumulated so far in the open window) times the owner's active process
// count. Lowest sharepri wins the CPU; ties are FIFO.
//
// Charging the open window's cost into the per-tick penalty keeps the
// feedback continuous; deferring it to window boundaries makes the dispatch
// loop oscillate user-by-user and breaks share proportionality.
class FsScheduler {
 public:
  FsScheduler(const FsParams& p, std::int64_t tick_ms, bool capping_enabled);

  int add_user(std::int64_t shares, std::optional<double> cap);  // returns user index
  int add_process(int user, int nice);                           // returns pid

  void on_ready(int pid, std::uint64_t seq);
  void set_running(int pid);
  void on_preempt(int pid, std::uint64_t seq);  // back of the queue
  void on_block(int pid);                       // completion: leaves for think

  void charge_tick(int pid);  // cost[owner] += tick_ms / shares[owner]
  // Advances the trailing cap-accounting window by one tick; pass the
  // running process's owner or -1 for an idle tick.
  void cap_tick(int running_user_or_none);

  void decay_usage();     // every usage_window_ms: usage = usage*decay + cost; cost = 0
  void decay_sharepri();  // every pri_window_ms: sharepri *= (pri_a*nice + pri_b), all procs
  void tick_adjust();     // every tick: ready/running procs gain owner usage pressure

  // Ready process with minimum sharepri whose owner is not throttled;
  // FIFO ties; -1 when nothing is eligible.
  int select_next() const;

  bool user_throttled(int user) const;
  int owner_of(int pid) const { return owner_[pid]; }
  double usage(int user) const { return usage_[user]; }
  double cost(int user) const { return cost_[user]; }
  int p_active(int user) const { return p_active_[user]; }
  double sharepri(int pid) const { return sharepri_[pid]; }
  int user_count() const { return static_cast<int>(usage_.size()); }

 private:
  enum class St : char { blocked, ready, running };

  FsParams p_;
  std::int64_t tick_ms_;
  bool capping_;
  std::int64_t window_ticks_;

  // per user
  std::vector<std::int64_t> shares_;
  std::vector<double> cap_;  // <0 = no cap
  std::vector<double> usage_;
  std::vector<double> cost_;
  std::vector<int> p_active_;
  std::vector<std::vector<char>> busy_ring_;
  std::vector<std::int64_t> ring_sum_;
  std::int64_t ring_pos_ = 0;
  std::int64_t elapsed_ticks_ = 0;

  // per process
  std::vector<int> owner_;
  std::vector<int> nice_;
  std::vector<double> sharepri_;
  std::vector<St> state_;
  std::vector<std::uint64_t> seq_;
};

}  // namespace sharesim
