#pragma once

#include <cstdint>
#include <random>

namespace pwcv {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derives an independent stream seed, e.g. per bucket or per run.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

// Seedable uniform generator; all randomized code takes one of these
// explicitly so runs are replayable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return std::generate_canonical<double, 53>(eng_);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() { return eng_(); }

    // Index in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return std::min<std::size_t>(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace pwcv
