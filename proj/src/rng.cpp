#include "relmatch/rng.hpp"

#include "relmatch/numeric.hpp"

namespace relmatch {

double Rng::normal() { return norm_quantile(uniform01()); }

std::uint64_t split_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base ^ ((stream + 1) * 0x9E3779B97F4A7C15ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace relmatch
