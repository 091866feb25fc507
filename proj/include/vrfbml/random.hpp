#ifndef VRFBML_RANDOM_HPP
#define VRFBML_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace vrfbml {

/**
 * Deterministic random source. mt19937_64 output is fully specified by the
 * standard and the derived draws below avoid std::*_distribution, whose
 * algorithms are implementation-defined, so identical seeds give identical
 * streams on every platform and toolchain.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); n must be >= 1.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    /// Standard normal via Box-Muller; two uniforms per pair, spare cached.
    double standard_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01(); // (0, 1]: keeps the log finite
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double gaussian(double sigma) { return sigma * standard_normal(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// In-place Fisher-Yates shuffle driven by the deterministic source above.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace vrfbml

#endif // VRFBML_RANDOM_HPP
