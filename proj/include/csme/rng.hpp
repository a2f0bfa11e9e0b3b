#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace csme::rng {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and logical coordinates
/// (run index, generation, row index, ...). Pure function of its arguments, so
/// draws keyed on logical positions never depend on thread scheduling.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix64(seed + kGamma);
    for (std::uint64_t p : parts) {
        h = mix64(h ^ (p + kGamma));
    }
    return h;
}

/// splitmix64 stream. Small, fast, and reproducible across platforms, which is
/// all the determinism contracts here need.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGamma;
        return mix64(state_);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool next_bool() { return (next() & 1ULL) != 0; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t next_below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    /// Standard normal via Box-Muller; avoids std::normal_distribution, whose
    /// output is not pinned down by the standard.
    double next_normal() {
        const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace csme::rng
