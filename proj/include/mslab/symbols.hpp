#pragma once

#include "mslab/frames.hpp"

#include <variant>
#include <vector>

namespace mslab {

/// phi = conj(u(z)) * v(z); unimodular on the circle.
struct UvBarSymbol {
    BlaschkeProduct u, v;
};

/// phi = sum_k coeffs[k - min_degree] z^k.
struct LaurentSymbol {
    int min_degree = 0;
    std::vector<Complex> coeffs;
};

/// phi = theta*h1 + conj(theta*h2) with polynomial h1, h2 (ascending coeffs);
/// every such symbol has A_phi = 0 on K_theta.
struct ZeroClassSymbol {
    BlaschkeProduct theta;
    std::vector<Complex> h1, h2;
};

/// phi + conj(psi) + c with phi, psi in K_theta given by model-basis coords.
struct SedlockSymbol {
    BlaschkeProduct theta;
    CVec phi_coords;
    CVec conj_coords;
    Complex c{0.0, 0.0};
};

/// psi(z) / (1 - alpha conj(theta(z))), |alpha| < 1.
struct AlphaQuotientSymbol {
    std::variant<BlaschkeProduct, LaurentSymbol> numerator;
    Complex alpha{0.0, 0.0};
    BlaschkeProduct theta;
};

namespace detail {

inline Complex eval_poly(const std::vector<Complex>& coeffs, const Complex& z) {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

inline Complex eval_laurent(const LaurentSymbol& s, const Complex& z) {
    // on the circle z^{-1} = conj(z)
    Complex acc = eval_poly(s.coeffs, z);
    if (s.min_degree >= 0) {
        Complex p(1.0, 0.0);
        for (int k = 0; k < s.min_degree; ++k) p *= z;
        return acc * p;
    }
    Complex p(1.0, 0.0);
    const Complex zinv = std::conj(z);
    for (int k = 0; k < -s.min_degree; ++k) p *= zinv;
    return acc * p;
}

} // namespace detail

/// An evaluable circle function built from Blaschke products, Laurent
/// polynomials, and the derived forms above.
class SymbolSpec {
public:
    using Form = std::variant<UvBarSymbol, LaurentSymbol, ZeroClassSymbol, SedlockSymbol,
                              AlphaQuotientSymbol>;

    SymbolSpec(Form form, std::string descriptor)
        : form_(std::move(form)), descriptor_(std::move(descriptor)) {
        if (const auto* a = std::get_if<AlphaQuotientSymbol>(&form_))
            if (std::abs(a->alpha) >= 1.0)
                throw std::invalid_argument("SymbolSpec: alpha form requires |alpha| < 1");
    }

    const Form& form() const { return form_; }
    const std::string& descriptor() const { return descriptor_; }

    Complex eval(const Complex& z) const {
        return std::visit(
            [&](const auto& f) -> Complex {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, UvBarSymbol>) {
                    return std::conj(f.u.eval_unchecked(z)) * f.v.eval_unchecked(z);
                } else if constexpr (std::is_same_v<T, LaurentSymbol>) {
                    return detail::eval_laurent(f, z);
                } else if constexpr (std::is_same_v<T, ZeroClassSymbol>) {
                    const Complex t = f.theta.eval_unchecked(z);
                    return t * detail::eval_poly(f.h1, z) +
                           std::conj(t * detail::eval_poly(f.h2, z));
                } else if constexpr (std::is_same_v<T, SedlockSymbol>) {
                    Complex phi(0.0, 0.0), psi(0.0, 0.0);
                    for (int k = 0; k < f.phi_coords.size(); ++k)
                        phi += f.phi_coords[k] * tm_basis_eval(f.theta, k, z);
                    for (int k = 0; k < f.conj_coords.size(); ++k)
                        psi += f.conj_coords[k] * tm_basis_eval(f.theta, k, z);
                    return phi + std::conj(psi) + f.c;
                } else {
                    const Complex denom = 1.0 - f.alpha * std::conj(f.theta.eval_unchecked(z));
                    if (std::abs(denom) < 1e-6)
                        throw std::domain_error("alpha symbol: denominator too close to zero");
                    const Complex num = std::visit(
                        [&](const auto& n) -> Complex {
                            using N = std::decay_t<decltype(n)>;
                            if constexpr (std::is_same_v<N, BlaschkeProduct>)
                                return n.eval_unchecked(z);
                            else
                                return detail::eval_laurent(n, z);
                        },
                        f.numerator);
                    return num / denom;
                }
            },
            form_);
    }

    CVec sample(const CircleGrid& grid) const {
        CVec out(grid.size);
        for (int n = 0; n < grid.size; ++n) out[n] = eval(grid.nodes[n]);
        return out;
    }

private:
    Form form_;
    std::string descriptor_;
};

inline SymbolSpec symbol_uv(const BlaschkeProduct& u, const BlaschkeProduct& v) {
    return SymbolSpec(UvBarSymbol{u, v}, "conj(" + to_text(u) + ")*(" + to_text(v) + ")");
}

inline SymbolSpec symbol_inner(const BlaschkeProduct& v) {
    return symbol_uv(BlaschkeProduct{}, v);
}

inline SymbolSpec symbol_laurent(int min_degree, std::vector<Complex> coeffs) {
    std::string d = "laurent[min=" + std::to_string(min_degree) + ";n=" +
                    std::to_string(coeffs.size()) + "]";
    return SymbolSpec(LaurentSymbol{min_degree, std::move(coeffs)}, std::move(d));
}

inline SymbolSpec symbol_const(const Complex& c) { return symbol_laurent(0, {c}); }

inline SymbolSpec symbol_z() { return symbol_laurent(1, {Complex(1.0, 0.0)}); }

inline SymbolSpec symbol_zero_class(const BlaschkeProduct& theta, std::vector<Complex> h1,
                                    std::vector<Complex> h2) {
    return SymbolSpec(ZeroClassSymbol{theta, std::move(h1), std::move(h2)},
                      "theta*h1+conj(theta*h2)[" + to_text(theta) + "]");
}

/// conj of a symbol, for the forms that are closed under conjugation.
inline SymbolSpec conj_symbol(const SymbolSpec& s) {
    if (const auto* uv = std::get_if<UvBarSymbol>(&s.form()))
        return symbol_uv(uv->v, uv->u);
    if (const auto* l = std::get_if<LaurentSymbol>(&s.form())) {
        std::vector<Complex> coeffs(l->coeffs.size());
        for (size_t k = 0; k < coeffs.size(); ++k)
            coeffs[k] = std::conj(l->coeffs[coeffs.size() - 1 - k]);
        const int max_degree = l->min_degree + static_cast<int>(l->coeffs.size()) - 1;
        return symbol_laurent(-max_degree, std::move(coeffs));
    }
    if (const auto* zc = std::get_if<ZeroClassSymbol>(&s.form()))
        return symbol_zero_class(zc->theta, zc->h2, zc->h1);
    throw std::invalid_argument("conj_symbol: form not closed under conjugation");
}

/// Pointwise product, for uv_bar x uv_bar and laurent x laurent.
inline SymbolSpec symbol_product(const SymbolSpec& a, const SymbolSpec& b) {
    if (const auto* ua = std::get_if<UvBarSymbol>(&a.form()))
        if (const auto* ub = std::get_if<UvBarSymbol>(&b.form()))
            return symbol_uv(multiply(ua->u, ub->u), multiply(ua->v, ub->v));
    if (const auto* la = std::get_if<LaurentSymbol>(&a.form()))
        if (const auto* lb = std::get_if<LaurentSymbol>(&b.form())) {
            std::vector<Complex> coeffs(la->coeffs.size() + lb->coeffs.size() - 1,
                                        Complex(0.0, 0.0));
            for (size_t i = 0; i < la->coeffs.size(); ++i)
                for (size_t j = 0; j < lb->coeffs.size(); ++j)
                    coeffs[i + j] += la->coeffs[i] * lb->coeffs[j];
            return symbol_laurent(la->min_degree + lb->min_degree, std::move(coeffs));
        }
    throw std::invalid_argument("symbol_product: unsupported form combination");
}

} // namespace mslab
