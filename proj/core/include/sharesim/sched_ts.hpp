#pragma once

#include <cstdint>
#include <vector>

#include "sharesim/types.hpp"

namespace sharesim {

// Generic time-share discipline: decayed-recent-CPU priority with nice
// bias and FIFO ties. Knows nothing about users — it schedules processes.
class TsScheduler {
 public:
  explicit TsScheduler(const TsParams& p);

  int add_process(int nice);  // returns pid

  void on_ready(int pid, std::uint64_t seq);
  void on_block(int pid);                          // leaves the run queue
  void on_quantum_expiry(int pid, std::uint64_t seq);  // back of the queue
  // A completed transaction clears its burst's CPU penalty: the next burst
  // starts fresh. Short demands therefore keep their high responsiveness,
  // which is the round-robin bias this discipline is known for.
  void on_complete(int pid);

  void charge_tick(int pid);   // running process accrues one tick
  void decay_recent_cpu();     // once per second, every process

  // Ready process with the lowest priority value; FIFO on ties; -1 = idle.
  int select_next() const;

  double priority(int pid) const;  // clamp(cpu_weight*rc + nice_weight*nice, 0, levels-1)
  double recent_cpu(int pid) const { return recent_cpu_[pid]; }
  bool ready(int pid) const { return ready_[pid]; }

 private:
  TsParams p_;
  std::vector<int> nice_;
  std::vector<double> recent_cpu_;
  std::vector<char> ready_;
  std::vector<std::uint64_t> seq_;
};

}  // namespace sharesim
