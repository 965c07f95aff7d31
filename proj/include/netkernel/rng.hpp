#pragma once

#include <cmath>
#include <cstdint>

namespace netkernel {

// Counter-based random streams. Every draw is a pure function of
// (seed, a, b, c, d), so simulated data is bit-identical across platforms,
// thread counts, and trajectory batch sizes.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(mix64(seed + 0x51ed2701)) {}

    std::uint64_t bits(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                       std::uint64_t d = 0) const {
        std::uint64_t h = seed_;
        h = mix64(h ^ mix64(a));
        h = mix64(h ^ mix64(b));
        h = mix64(h ^ mix64(c));
        h = mix64(h ^ mix64(d));
        return h;
    }

    // uniform in (0,1); never returns 0 so it is safe inside log()
    double uniform(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                   std::uint64_t d = 0) const {
        return to_unit(bits(a, b, c, d));
    }

    double uniform_in(double lo, double hi, std::uint64_t a, std::uint64_t b = 0,
                   std::uint64_t c = 0, std::uint64_t d = 0) const {
        return lo + (hi - lo) * uniform(a, b, c, d);
    }

    // standard normal via Box-Muller on two derived uniforms
    double normal(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                  std::uint64_t d = 0) const {
        const std::uint64_t h = bits(a, b, c, d);
        const double u1 = to_unit(mix64(h ^ 0xa5a5a5a5a5a5a5a5ull));
        const double u2 = to_unit(mix64(h ^ 0x5a5a5a5a5a5a5a5aull));
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n, std::uint64_t a, std::uint64_t b = 0,
                        std::uint64_t c = 0, std::uint64_t d = 0) const {
        return bits(a, b, c, d) % n;
    }

  private:
    static double to_unit(std::uint64_t h) {
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed_;
};

// Sequential convenience stream built on the same mixer; used where a plain
// generator is enough (probe draws, k-means restarts) and cross-platform
// determinism still matters.
class SeqRng {
  public:
    explicit SeqRng(std::uint64_t seed) : rng_(seed), n_(0) {}
    double uniform() { return rng_.uniform(n_++); }
    double uniform_in(double lo, double hi) { return rng_.uniform_in(lo, hi, n_++); }
    double normal() { return rng_.normal(n_++); }
    std::uint64_t below(std::uint64_t n) { return rng_.below(n, n_++); }

  private:
    CounterRng rng_;
    std::uint64_t n_;
};

}  // namespace netkernel
