#include "sharesim/sched_ts.hpp"

#include <algorithm>

namespace sharesim {

TsScheduler::TsScheduler(const TsParams& p) : p_(p) {}

int TsScheduler::add_process(int nice) {
  nice_.push_back(nice);
  recent_cpu_.push_back(0.0);
  ready_.push_back(0);
  seq_.push_back(0);
  return static_cast<int>(nice_.size()) - 1;
}

void TsScheduler::on_ready(int pid, std::uint64_t seq) {
  ready_[pid] = 1;
  seq_[pid] = seq;
}

void TsScheduler::on_block(int pid) { ready_[pid] = 0; }

void TsScheduler::on_quantum_expiry(int pid, std::uint64_t seq) {
  ready_[pid] = 1;
  seq_[pid] = seq;
}

void TsScheduler::on_complete(int pid) { recent_cpu_[pid] = 0.0; }

void TsScheduler::charge_tick(int pid) { recent_cpu_[pid] += 1.0; }

void TsScheduler::decay_recent_cpu() {
  for (auto& rc : recent_cpu_) rc *= p_.decay_per_s;
}

double TsScheduler::priority(int pid) const {
  double pri = p_.cpu_weight * recent_cpu_[pid] + p_.nice_weight * nice_[pid];
  return std::clamp(pri, 0.0, static_cast<double>(p_.levels - 1));
}

int TsScheduler::select_next() const {
  int best = -1;
  double best_pri = 0.0;
  for (int pid = 0; pid < static_cast<int>(ready_.size()); ++pid) {
    if (!ready_[pid]) continue;
    const double pri = priority(pid);
    if (best < 0 || pri < best_pri || (pri == best_pri && seq_[pid] < seq_[best])) {
      best = pid;
      best_pri = pri;
    }
  }
  return best;
}

}  // namespace sharesim
