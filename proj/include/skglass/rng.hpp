#pragma once

// skglass: deterministic random number generation and seed splitting.
//
// All randomness in the library flows through xoshiro256++ engines seeded
// from 64-bit stream seeds. Parallel disorder averaging derives one stream
// seed per (branch, replica) pair with derive_seed(), so results never
// depend on scheduling, only on the master seed.

#include <array>
#include <cstdint>

namespace skglass::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Vigna 2015); bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed-splitting function: child stream = mix(master XOR mix(stream index)).
// Distinct stream indices give independent-behaving child streams; the same
// (master, stream) pair always yields the same child seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream * kGolden + kGolden));
}

// xoshiro256++ (Blackman & Vigna 2018). State expanded from the 64-bit seed
// with splitmix64 steps, as recommended by the authors.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += kGolden;
      word = mix64(sm);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace skglass::rng
