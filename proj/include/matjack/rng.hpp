#pragma once

#include <cmath>
#include <cstdint>

// Counter-based deterministic random stream. Every variate is a pure
// function of (seed, index), so streams are reproducible across platforms
// and independent of evaluation order. The word function is two rounds of
// the SplitMix64 finalizer keyed by the seed; Gaussian variates are obtained
// from consecutive uniform words by the Box-Muller transform.

namespace matjack {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t word(std::uint64_t index) const {
        std::uint64_t z = seed_ + detail::kGolden * (index + 1);
        return detail::mix64(detail::mix64(z) ^ seed_);
    }

    /// Uniform in (0, 1]; never exactly zero, safe under log().
    double uniform_open(std::uint64_t index) const {
        return static_cast<double>((word(index) >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t index) const {
        return static_cast<double>(word(index) >> 11) * 0x1.0p-53;
    }

    /// Standard normal variate, consuming words 2*index and 2*index + 1.
    double gaussian(std::uint64_t index) const {
        const double u1 = uniform_open(2 * index);
        const double u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t seed_;
};

/// Derive an independent child seed, e.g. one per Monte Carlo trial.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return detail::mix64(base_seed ^ detail::mix64(stream + detail::kGolden));
}

}  // namespace matjack
