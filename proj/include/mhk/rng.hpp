#pragma once

#include <cstdint>

namespace mhk {

// Counter-keyed deterministic random stream.
//
// Reproducibility is part of the simulator's contract, so the generator is
// pinned here instead of delegating to std::* distributions (whose outputs
// are implementation-defined).  The construction is splitmix64:
//
//   mix64(z): z += 0x9E3779B97F4A7C15 is folded in by the caller; the
//   finalizer below is the standard xor-shift-multiply chain.
//
// A stream is identified by a 64-bit seed.  `at(counter)` opens an
// independent draw sequence for that counter (one per simulation step), and
// `derive(lane)` forks a child stream (one per ensemble run, plus fixed
// lanes separating schedule draws from initial-opinion draws).  Same seed,
// same counter, same call order => identical draws, on any platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Sequential draws for one counter value.
  class Draws {
   public:
    explicit Draws(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
      state_ += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = state_;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

   private:
    std::uint64_t state_;
  };

  Draws at(std::uint64_t counter) const { return Draws(seed_ ^ mix64(counter)); }

  RngStream derive(std::uint64_t lane) const {
    return RngStream(mix64(seed_ ^ mix64(lane ^ 0xA3C59AC2ULL)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Fixed lanes so schedule draws and initial-opinion draws never share a
// sequence even when the user gives both the same seed.
inline constexpr std::uint64_t kScheduleLane = 0;
inline constexpr std::uint64_t kInitialLane = 1;

}  // namespace mhk
