#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace segtransfer {

// splitmix64; used both as a seed scrambler and as the fixed per-estimator
// seed splitting function.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

// 64-bit hash of (master seed, index, tag). This is the documented seed
// derivation for per-sample, per-channel streams: platform-independent and
// stable across releases.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::string_view tag) {
    return splitmix64(splitmix64(master ^ splitmix64(index)) ^ fnv1a64(tag));
}

// mt19937_64 with hand-rolled draw helpers. The engine itself is fully
// specified by the standard; std::uniform_*_distribution is not, so all
// bounded draws go through the helpers below to keep datasets byte-identical
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool next_bool(double p) { return next_unit() < p; }

    // Knuth's product method; fine for the small rates used here.
    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_unit();
        } while (p > limit);
        return k - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace segtransfer
