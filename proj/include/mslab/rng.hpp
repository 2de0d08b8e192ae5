#pragma once

#include <complex>
#include <cstdint>

namespace mslab {

// splitmix64. Chosen over std::mt19937_64 + <random> distributions because the
// standard distributions are implementation-defined; this stream is identical
// on every platform, which the byte-identical report requirement relies on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // uniform w.r.t. area on the disk of the given radius
    std::complex<double> disk(double radius) {
        const double r = radius * std::sqrt(uniform());
        const double phi = 2.0 * M_PI * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    std::complex<double> unimodular() {
        const double phi = 2.0 * M_PI * uniform();
        return {std::cos(phi), std::sin(phi)};
    }

private:
    std::uint64_t state_;
};

// Independent per-trial streams derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    Rng mix(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    mix.next_u64();
    return mix.next_u64();
}

} // namespace mslab
