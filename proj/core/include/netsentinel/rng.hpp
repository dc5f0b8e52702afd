#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace netsentinel {

/// Deterministic random source. Wraps std::mt19937_64 but implements every
/// distribution by hand: the standard library's distribution objects are
/// not bit-reproducible across implementations, and experiment outputs must
/// be byte-identical for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform double in [0, 1), 53 bits of entropy.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k) {
        std::vector<std::uint32_t> pool(n);
        for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::uint32_t> out;
        out.reserve(k);
        for (std::uint32_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::uint32_t>(uniform_int(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

    /// Mixes (seed, index) into an independent stream seed. splitmix64
    /// finalizer; used to derive per-purpose and per-node substreams that do
    /// not depend on draw order elsewhere.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace netsentinel
