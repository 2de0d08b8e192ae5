#pragma once

#include "mslab/fft.hpp"

#include <stdexcept>

namespace mslab {

/// Roots-of-unity quadrature grid: nodes[k] = e^{2 pi i k / size}. The mean
/// over nodes is the trapezoidal rule on the circle, spectrally accurate for
/// functions analytic in an annulus around |z| = 1.
struct CircleGrid {
    int size = 0;
    CVec nodes;

    explicit CircleGrid(int n) : size(n), nodes(n) {
        if (n < 64 || !is_power_of_two(n))
            throw std::invalid_argument("CircleGrid: size must be a power of two >= 64");
        for (int k = 0; k < n; ++k) {
            const double t = 2.0 * M_PI * k / n;
            nodes[k] = Complex(std::cos(t), std::sin(t));
        }
    }
};

/// <f, g> = mean over nodes of f * conj(g).
inline Complex inner_product(const CVec& f, const CVec& g, const CircleGrid& grid) {
    if (f.size() != g.size() || f.size() != grid.size)
        throw std::invalid_argument("inner_product: sample count mismatch");
    return g.dot(f) / static_cast<double>(grid.size);
}

inline double quadrature_norm(const CVec& f, const CircleGrid& grid) {
    return std::sqrt(std::abs(inner_product(f, f, grid)));
}

/// Smallest power of two >= max(256, 8 * (total degree + pos + neg)); keeps
/// aliasing far below every tolerance given the 0.8 radius cap on zeros.
inline int auto_grid_size(int total_degree, int pos, int neg) {
    const long need = std::max(256L, 8L * (total_degree + pos + neg));
    long n = 256;
    while (n < need) n <<= 1;
    return static_cast<int>(n);
}

enum class RieszHalf { analytic, antianalytic };

/// Fourier projection: zero the negative (resp. nonnegative) frequency bins
/// under the symmetric convention (bins size/2 .. size-1 are negative).
inline CVec riesz_project(const CVec& samples, const CircleGrid& grid, RieszHalf half) {
    if (samples.size() != grid.size)
        throw std::invalid_argument("riesz_project: sample count mismatch");
    CVec hat = fft(samples);
    const int n = grid.size;
    if (half == RieszHalf::analytic)
        hat.segment(n / 2, n / 2).setZero();
    else
        hat.segment(0, n / 2).setZero();
    return ifft(std::move(hat));
}

} // namespace mslab
