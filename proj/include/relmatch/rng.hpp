#pragma once

#include <cstdint>
#include <random>

namespace relmatch {

// Deterministic random source. mt19937_64 raw output is specified by the
// standard, and all variate transforms below are implemented locally, so a
// given seed reproduces identical samples byte-for-byte on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0,1); safe to feed into quantiles.
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal();  // standard normal via inverse-cdf transform

  private:
    std::mt19937_64 gen_;
};

// Seed-splitting rule for parallel / per-scenario streams:
// stream k of a base seed is splitmix64(base ^ (k+1)*0x9E3779B97F4A7C15).
std::uint64_t split_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace relmatch
