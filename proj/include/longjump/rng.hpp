#pragma once
// Deterministic RNG plumbing: one master seed, replica streams derived by
// splitmix64 so replicas are independent and order-insensitive.

#include <cmath>
#include <cstdint>
#include <random>

namespace longjump {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive the seed for replica r from the master seed.
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
  std::uint64_t s = master ^ (0xda3e39cb94b95bdbULL * (replica + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // uniform in [0,1) with 53 random bits; avoids distribution objects so the
  // stream is reproducible by construction.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform in (0,1], safe as a log argument
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection-free enough for n << 2^64; use rejection to be exact.
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = engine_();
      __uint128_t m = static_cast<__uint128_t>(r) * n;
      if (static_cast<std::uint64_t>(m) >= threshold)
        return static_cast<std::uint64_t>(m >> 64);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace longjump
