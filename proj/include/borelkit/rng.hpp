#pragma once

#include <cstdint>
#include <string>

namespace borelkit {

// Splittable deterministic generator (splitmix64 core). Every random
// choice in the library flows from one seeded instance of this; split()
// derives an independent stream so parallel evaluation order cannot
// change the report.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), n > 0.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  int next_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool next_bool() { return (next_u64() & 1u) != 0; }

  double next_unit() {  // [0,1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  SplitRng split() { return SplitRng(next_u64() ^ 0x5851f42d4c957f2dull); }

  static const char* name() { return "splitmix64"; }

 private:
  std::uint64_t state_;
};

}  // namespace borelkit
