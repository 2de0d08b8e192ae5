#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace mslab {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

// Iterative radix-2 Cooley-Tukey. Forward uses e^{-2pi i kn/N}; the inverse
// applies the 1/N normalisation so ifft(fft(x)) == x.
inline void fft_radix2(CVec& a, bool inverse) {
    const Eigen::Index n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    for (Eigen::Index i = 1, j = 0; i < n; ++i) {
        Eigen::Index bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (Eigen::Index len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (Eigen::Index i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (Eigen::Index k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) a /= static_cast<double>(n);
}

} // namespace detail

inline CVec fft(CVec a) {
    detail::fft_radix2(a, false);
    return a;
}

inline CVec ifft(CVec a) {
    detail::fft_radix2(a, true);
    return a;
}

} // namespace mslab
