#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace tsmdp {

// SplitMix64 step, used for seeding and key mixing.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2c62ca4cfbbULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t h = splitmix64(s);
  s ^= b + 0x3c6ef372fe94f82bULL;
  h ^= splitmix64(s);
  return h;
}

/// xoshiro256++ stream with convenience draws. Each consumer owns its
/// stream; streams are derived from (master seed, counter keys) so that
/// adding a new consumer never perturbs existing ones.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
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

  /// Uniform on [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on {0, ..., n-1}; n >= 1.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Lemire-style rejection keeps the draw unbiased.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = (0ULL - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the polar method.
  double normal() {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

/// Counter-based stream derivation: a factory identifies a point in the
/// (master_seed, key...) tree and hands out independent child factories
/// and leaf streams. Purely functional, cheap to copy.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t master) : key_(splitmix64(master)) {}

  StreamFactory child(std::uint64_t tag) const {
    return StreamFactory(key_, tag);
  }

  RngStream stream(std::uint64_t index) const {
    return RngStream(mix_key(key_, index));
  }

  RngStream stream() const { return stream(0); }

  std::uint64_t derive_seed(std::uint64_t index) const { return mix_key(key_, index); }

 private:
  StreamFactory(std::uint64_t parent_key, std::uint64_t tag)
      : key_(mix_key(parent_key, tag)) {}
  std::uint64_t key_;
};

// Fixed purpose tags so diagnostics added later never shift existing draws.
namespace stream_tag {
inline constexpr std::uint64_t kEnvironment = 1;
inline constexpr std::uint64_t kPolicySearch = 2;
inline constexpr std::uint64_t kPosteriorDraw = 3;
inline constexpr std::uint64_t kTieBreak = 4;
inline constexpr std::uint64_t kInit = 5;
inline constexpr std::uint64_t kReplicate = 6;
inline constexpr std::uint64_t kOracle = 7;
}  // namespace stream_tag

}  // namespace tsmdp
