#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ocff {

/// SplitMix64 (Steele, Lea & Flood, 2014). Used instead of a std:: engine so
/// that a (seed, draw order) pair reproduces bit-identically on every
/// platform and standard library; std::uniform_* distributions make no such
/// promise.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 significant bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Standard normal via Box-Muller; consumes exactly two draws per call.
    double normal() {
        const double u1 = 1.0 - next_double(); // (0, 1], keeps log finite
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    /// Uniform integer in [0, n); multiply-shift reduction, no rejection
    /// loop, so the number of draws consumed is input-independent.
    std::uint64_t bounded(std::uint64_t n) {
        return std::uint64_t(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Fisher-Yates with a pinned draw order; shuffled index files must
/// reproduce byte-identically across runs and platforms.
template <class T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace ocff
