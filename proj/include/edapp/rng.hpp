#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace edapp {

// Deterministic, platform-independent random number generation. All
// stochastic code in the toolkit draws from this generator with explicit
// seeds; the standard <random> distributions are avoided because their
// output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // splitmix64 step
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // unit exponential via inversion; uniform01 < 1 so the log is finite
    double exponential() { return -std::log(1.0 - uniform01()); }

    // standard normal, Box-Muller (one value per call, no caching so the
    // stream position stays easy to reason about)
    double normal() {
        double u1 = 1.0 - uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double lognormal(double log_mean, double log_sd) {
        return std::exp(normal(log_mean, log_sd));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Knuth product method; adequate for the means this toolkit draws
    // (per-kernel counts are O(1), session totals are O(10^3)).
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }

    // Fisher-Yates shuffle of indices (or any random-access container)
    template <typename Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_u64() % i);
            std::swap(c[i - 1], c[j]);
        }
    }

private:
    std::uint64_t state_;
};

// FNV-1a, used both for input checksums and subject-keyed seed derivation.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Per-subject seeds are derived from (base seed, subject id) so that
// parallel cohort processing is order-independent.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view key) {
    Rng mixer(base ^ fnv1a64(key));
    return mixer.next_u64();
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    Rng mixer(base ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return mixer.next_u64();
}

}  // namespace edapp
