#pragma once

#include "mslab/fft.hpp"
#include "mslab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace mslab {

/// Finite Blaschke product: a unimodular constant times a finite product of
/// disk-automorphism factors (z - a)/(1 - conj(a) z) with |a| < 1. Exact data:
/// the constant and the zero multiset. Degree 0 means a unimodular constant.
class BlaschkeProduct {
public:
    BlaschkeProduct() = default;

    BlaschkeProduct(Complex constant, std::vector<Complex> zeros)
        : constant_(constant), zeros_(std::move(zeros)) {
        if (std::abs(std::abs(constant_) - 1.0) > 1e-12)
            throw std::invalid_argument("BlaschkeProduct: constant must be unimodular");
        for (const Complex& a : zeros_)
            if (std::abs(a) > 1.0 - 1e-9)
                throw std::invalid_argument("BlaschkeProduct: zeros must lie strictly inside the disk");
    }

    explicit BlaschkeProduct(std::vector<Complex> zeros)
        : BlaschkeProduct(Complex(1.0, 0.0), std::move(zeros)) {}

    const Complex& constant() const { return constant_; }
    const std::vector<Complex>& zeros() const { return zeros_; }
    int degree() const { return static_cast<int>(zeros_.size()); }
    bool is_constant() const { return zeros_.empty(); }

    /// Boundary evaluation. Requires |z| = 1 within 1e-8; the result has
    /// modulus 1 up to roundoff.
    Complex eval(const Complex& z) const {
        if (std::abs(std::abs(z) - 1.0) > 1e-8)
            throw std::domain_error("BlaschkeProduct::eval: point is not on the unit circle");
        return eval_unchecked(z);
    }

    Complex eval_unchecked(const Complex& z) const {
        Complex w = constant_;
        for (const Complex& a : zeros_) w *= (z - a) / (1.0 - std::conj(a) * z);
        return w;
    }

private:
    Complex constant_{1.0, 0.0};
    std::vector<Complex> zeros_;
};

inline BlaschkeProduct multiply(const BlaschkeProduct& b1, const BlaschkeProduct& b2) {
    std::vector<Complex> zeros = b1.zeros();
    zeros.insert(zeros.end(), b2.zeros().begin(), b2.zeros().end());
    return BlaschkeProduct(b1.constant() * b2.constant(), std::move(zeros));
}

/// r = max |zero| (0 for constants). Taylor coefficient k of the product is
/// O(r^k), which is what sizes every truncation window downstream.
inline double tail_radius(const BlaschkeProduct& b) {
    double r = 0.0;
    for (const Complex& a : b.zeros()) r = std::max(r, std::abs(a));
    return r;
}

namespace detail {

// Greedy minimum-distance multiset matching: all candidate pairs within tol,
// taken in ascending distance order (index order breaks ties so the matching
// is deterministic). Returns pairs (i, j) into z1/z2.
inline std::vector<std::pair<int, int>> match_zeros(const std::vector<Complex>& z1,
                                                    const std::vector<Complex>& z2,
                                                    double tol) {
    struct Cand { double d; int i, j; };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(z1.size()); ++i)
        for (int j = 0; j < static_cast<int>(z2.size()); ++j) {
            const double d = std::abs(z1[i] - z2[j]);
            if (d <= tol) cands.push_back({d, i, j});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(a.d, a.i, a.j) < std::tie(b.d, b.i, b.j);
    });
    std::vector<bool> used1(z1.size(), false), used2(z2.size(), false);
    std::vector<std::pair<int, int>> pairs;
    for (const Cand& c : cands) {
        if (used1[c.i] || used2[c.j]) continue;
        used1[c.i] = used2[c.j] = true;
        pairs.emplace_back(c.i, c.j);
    }
    return pairs;
}

} // namespace detail

/// Divisibility modulo unimodular constants: the zero multiset of b1 embeds
/// into that of b2 with pairwise distance <= tol.
inline bool divides(const BlaschkeProduct& b1, const BlaschkeProduct& b2, double tol = 1e-8) {
    if (tol <= 0) throw std::invalid_argument("divides: tol must be positive");
    if (b1.degree() > b2.degree()) return false;
    return static_cast<int>(detail::match_zeros(b1.zeros(), b2.zeros(), tol).size()) == b1.degree();
}

/// Greatest common inner divisor: maximal zero matching, matched zeros
/// averaged, constant normalised to 1.
inline BlaschkeProduct gcd(const BlaschkeProduct& b1, const BlaschkeProduct& b2, double tol = 1e-8) {
    if (tol <= 0) throw std::invalid_argument("gcd: tol must be positive");
    std::vector<Complex> zeros;
    for (const auto& [i, j] : detail::match_zeros(b1.zeros(), b2.zeros(), tol))
        zeros.push_back(0.5 * (b1.zeros()[i] + b2.zeros()[j]));
    return BlaschkeProduct(std::move(zeros));
}

/// Quotient b / d for d | b: removes d's matched zeros, keeps b's constant.
inline BlaschkeProduct divide_out(const BlaschkeProduct& b, const BlaschkeProduct& d,
                                  double tol = 1e-8) {
    const auto pairs = detail::match_zeros(d.zeros(), b.zeros(), tol);
    if (static_cast<int>(pairs.size()) != d.degree())
        throw std::invalid_argument("divide_out: divisor does not divide the product");
    std::vector<bool> removed(b.zeros().size(), false);
    for (const auto& [i, j] : pairs) removed[j] = true;
    std::vector<Complex> zeros;
    for (size_t j = 0; j < b.zeros().size(); ++j)
        if (!removed[j]) zeros.push_back(b.zeros()[j]);
    return BlaschkeProduct(b.constant(), std::move(zeros));
}

/// Taylor coefficients c_0..c_{count-1} via DFT of circle samples. The product
/// is analytic on a disk of radius 1/r, so per-coefficient aliasing is bounded
/// by r^{grid_size - count}.
inline std::vector<Complex> fourier_coefficients(const BlaschkeProduct& b, int count,
                                                 int grid_size) {
    if (count < 0) throw std::invalid_argument("fourier_coefficients: count must be >= 0");
    if (!is_power_of_two(grid_size) || grid_size < 4 * (count + b.degree()))
        throw std::invalid_argument("fourier_coefficients: grid too small (need a power of two >= 4*(count+degree))");
    CVec samples(grid_size);
    for (int n = 0; n < grid_size; ++n) {
        const double t = 2.0 * M_PI * n / grid_size;
        samples[n] = b.eval_unchecked(Complex(std::cos(t), std::sin(t)));
    }
    const CVec hat = fft(std::move(samples));
    std::vector<Complex> coeffs(count);
    for (int k = 0; k < count; ++k) coeffs[k] = hat[k] / static_cast<double>(grid_size);
    return coeffs;
}

/// Zeros drawn uniformly on the disk of radius radius_cap, constant 1.
/// Deterministic given the stream.
inline BlaschkeProduct random_blaschke(int degree, double radius_cap, Rng& rng) {
    if (degree < 0) throw std::invalid_argument("random_blaschke: degree must be >= 0");
    if (radius_cap < 0.0 || radius_cap > 0.8)
        throw std::invalid_argument("random_blaschke: radius_cap must lie in [0, 0.8]");
    std::vector<Complex> zeros(degree);
    for (auto& a : zeros) a = rng.disk(radius_cap);
    return BlaschkeProduct(std::move(zeros));
}

// --- textual form: `c=<re>+<im>i; zeros=<re>+<im>i, ...` ------------------

namespace detail {

inline std::string strip_spaces(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

// Accepts re, re+imi, re-imi, imi, i, -i (after whitespace removal).
inline Complex parse_complex(const std::string& tok) {
    if (tok.empty()) throw std::invalid_argument("parse_complex: empty literal");
    std::string s = tok;
    bool imaginary_only = false;
    double re = 0.0, im = 0.0;
    if (s.back() == 'i') {
        s.pop_back();
        // find the split between the real part and the imaginary coefficient:
        // last '+'/'-' not in an exponent and not leading
        size_t split = std::string::npos;
        for (size_t p = s.size(); p-- > 1;) {
            if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
                split = p;
                break;
            }
        }
        std::string im_str;
        if (split == std::string::npos) {
            imaginary_only = true;
            im_str = s;
        } else {
            im_str = s.substr(split);
            s = s.substr(0, split);
        }
        if (im_str.empty() || im_str == "+") im = 1.0;
        else if (im_str == "-") im = -1.0;
        else {
            char* end = nullptr;
            im = std::strtod(im_str.c_str(), &end);
            if (end == nullptr || *end != '\0')
                throw std::invalid_argument("parse_complex: bad imaginary part in '" + tok + "'");
        }
    }
    if (!imaginary_only && !s.empty()) {
        char* end = nullptr;
        re = std::strtod(s.c_str(), &end);
        if (end == nullptr || *end != '\0')
            throw std::invalid_argument("parse_complex: bad real part in '" + tok + "'");
    }
    return {re, im};
}

inline std::string format_complex(const Complex& z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real();
    if (z.imag() >= 0) os << "+";
    os << z.imag() << "i";
    return os.str();
}

} // namespace detail

/// Parses `c=<re>+<im>i; zeros=<re>+<im>i, ...`; both parts optional
/// (c defaults to 1, empty input is the constant 1). Whitespace-insensitive.
inline BlaschkeProduct parse_blaschke(const std::string& text) {
    const std::string s = detail::strip_spaces(text);
    Complex c(1.0, 0.0);
    std::vector<Complex> zeros;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find(';', pos);
        if (next == std::string::npos) next = s.size();
        const std::string part = s.substr(pos, next - pos);
        pos = next + 1;
        if (part.empty()) continue;
        if (part.rfind("c=", 0) == 0) {
            c = detail::parse_complex(part.substr(2));
        } else if (part.rfind("zeros=", 0) == 0) {
            const std::string list = part.substr(6);
            size_t q = 0;
            while (q < list.size()) {
                size_t comma = list.find(',', q);
                if (comma == std::string::npos) comma = list.size();
                const std::string tok = list.substr(q, comma - q);
                if (!tok.empty()) zeros.push_back(detail::parse_complex(tok));
                q = comma + 1;
            }
        } else {
            throw std::invalid_argument("parse_blaschke: unknown field in '" + part + "'");
        }
    }
    return BlaschkeProduct(c, std::move(zeros));
}

inline std::string to_text(const BlaschkeProduct& b) {
    std::string out = "c=" + detail::format_complex(b.constant());
    out += "; zeros=";
    for (size_t i = 0; i < b.zeros().size(); ++i) {
        if (i) out += ", ";
        out += detail::format_complex(b.zeros()[i]);
    }
    return out;
}

} // namespace mslab
