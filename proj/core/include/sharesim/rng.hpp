#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sharesim::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Deterministic per-process stream keyed by (seed, user, process index).
// Adding a process never perturbs another process's draws.
class Stream {
 public:
  Stream() = default;
  Stream(std::uint64_t seed, std::string_view user, int index) {
    state_ = seed ^ fnv1a64(user);
    state_ = state_ * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(index) + 1;
    splitmix64(state_);  // decorrelate nearby keys
  }

  double uniform01() {  // [0, 1)
    return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
  }

  double exponential(double mean) {  // inverse CDF; mean 0 -> always 0
    return -mean * std::log1p(-uniform01());
  }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace sharesim::rng
