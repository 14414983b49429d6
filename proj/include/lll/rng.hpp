#pragma once

#include <cstdint>
#include <limits>

namespace lll {

/// Counter-based generator: the n-th output is a pure function of
/// (seed, stream, n). Trials get stream id = trial index, so results do not
/// depend on the order or thread in which trials are executed.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) + stream * 0x9e3779b97f4a7c15ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + 0xd1b54a32d192ed03ULL * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-and-reject.
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Degenerate probabilities consume no randomness, which keeps streams
    /// aligned when a mark is certain.
    bool bernoulli(double p) {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        return uniform() < p;
    }

    /// Independent child generator, deterministic in (parent key, id).
    CounterRng split(std::uint64_t id) const {
        CounterRng child;
        child.key_ = mix(key_ ^ mix(id + 0xa0761d6478bd642fULL));
        return child;
    }

    std::uint64_t draws() const { return counter_; }

    /// Stateless keyed hash to a uniform double in [0,1).
    static double keyed_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        const std::uint64_t h = mix(mix(mix(a) ^ (b * 0x9e3779b97f4a7c15ULL)) ^ (c + 0x632be59bd9b4e019ULL));
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace lll
