#pragma once

#include <cstdint>
#include <initializer_list>

namespace nqsim {

std::uint64_t splitmix64(std::uint64_t x);

// Key derived from a seed and any number of indices (point, run, ...).
std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> indices);

// Counter-based generator: the n-th draw is a pure function of (key, n), so
// streams can be split by key and evaluated in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  double uniform();        // [0, 1)
  double uniform_open();   // (0, 1)
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nqsim
