#include <catch_amalgamated.hpp>

#include "mslab/operators.hpp"

using namespace mslab;
using Catch::Approx;

namespace {

BlaschkeProduct z_pow(int n) {
    return BlaschkeProduct(std::vector<Complex>(n, Complex(0.0, 0.0)));
}

SymbolSpec symbol_zbar() { return symbol_laurent(-1, {Complex(1.0, 0.0)}); }

BlaschkeProduct rand_bp(Rng& rng, int min_deg, int max_deg, double cap = 0.5) {
    return random_blaschke(rng.uniform_int(min_deg, max_deg), cap, rng);
}

} // namespace

TEST_CASE("compress basics") {
    const CircleGrid g(256);
    const Frame k3 = model_basis(z_pow(3), g);
    const OperatorMatrix id = compress(symbol_const(Complex(1.0, 0.0)), k3, k3, g);
    REQUIRE((id.m - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

    const OperatorMatrix shift = compress(symbol_z(), k3, k3, g);
    CMat expected = CMat::Zero(3, 3);
    expected(1, 0) = expected(2, 1) = Complex(1.0, 0.0);
    REQUIRE((shift.m - expected).cwiseAbs().maxCoeff() < 1e-12);

    REQUIRE_THROWS_AS(compress(symbol_z(), k3, model_basis(z_pow(3), CircleGrid(128)), g),
                      std::invalid_argument);
}

TEST_CASE("compression of the half-zero product on K_{z^2}") {
    const CircleGrid g(256);
    const BlaschkeProduct bh({Complex(0.5, 0.0)});
    const Frame k2 = model_basis(z_pow(2), g);
    const OperatorMatrix a = compress(symbol_inner(bh), k2, k2, g);

    // projection oracle from the Taylor coefficients: columns are images of 1, z
    const auto c = fourier_coefficients(bh, 2, 256);
    CMat expected(2, 2);
    expected << c[0], Complex(0.0, 0.0), c[1], c[0];
    REQUIRE((a.m - expected).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(a.m(0, 0).real() == Approx(-0.5).margin(1e-12));
    REQUIRE(a.m(1, 0).real() == Approx(0.75).margin(1e-12));
    REQUIRE(a.m(1, 1).real() == Approx(-0.5).margin(1e-12));
}

TEST_CASE("truncated Toeplitz operators on the model space") {
    const CircleGrid g(256);
    const OperatorMatrix az = tto(symbol_z(), z_pow(2), g);
    REQUIRE(std::abs(az.m(1, 0) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(az.m(0, 0)) + std::abs(az.m(0, 1)) + std::abs(az.m(1, 1)) < 1e-12);

    const OperatorMatrix azb = tto(symbol_zbar(), z_pow(2), g);
    REQUIRE(std::abs(azb.m(0, 1) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(azb.m(0, 0)) + std::abs(azb.m(1, 0)) + std::abs(azb.m(1, 1)) < 1e-12);

    const SymbolSpec zero_sym = symbol_zero_class(z_pow(2), {Complex(0.0, 0.0), Complex(1.0, 0.0)},
                                                  {Complex(1.0, 0.0)});
    REQUIRE(operator_norm(tto(zero_sym, z_pow(2), g).m) < 1e-9);
}

TEST_CASE("dual truncated Toeplitz sections") {
    const CircleGrid g(256);
    const OperatorMatrix d = dtto(symbol_z(), z_pow(2), 6, 6, g);
    // column of z^{-1} (index 6) vanishes: z * z^{-1} = 1 lies in K_{z^2}
    REQUIRE(d.m.col(6).norm() < 1e-12);
    // D_z(theta) = theta z: unit coordinate at dual index 1
    REQUIRE(std::abs(d.m(1, 0) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(d.m.col(0).norm() == Approx(1.0).margin(1e-12));

    const OperatorMatrix db = dtto(symbol_zbar(), z_pow(2), 6, 6, g);
    // D_conj(z)(z^{-1}) = z^{-2}
    REQUIRE(std::abs(db.m(7, 6) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("truncated Hankel operators") {
    const CircleGrid g(256);
    REQUIRE(operator_norm(tho(symbol_const(Complex(0.6, 0.8)), z_pow(2), 6, 6, g).m) < 1e-10);

    const OperatorMatrix b = tho(symbol_z(), z_pow(2), 6, 6, g);
    // image of z is z^2 = theta: single 1 at dual index 0, second column
    REQUIRE(std::abs(b.m(0, 1) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(b.m.col(0).norm() < 1e-12);

    const OperatorMatrix bb = tho(symbol_zbar(), z_pow(2), 6, 6, g);
    // image of 1 is z^{-1}: first anti-analytic index, first column
    REQUIRE(std::abs(bb.m(6, 0) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("dual truncated Hankel operators") {
    const CircleGrid g(256);
    const OperatorMatrix c = dtho(symbol_zbar(), z_pow(2), 6, 6, g);
    // image of theta = z^2 z^{-1} = z: row of z, column 0
    REQUIRE(std::abs(c.m(1, 0) - Complex(1.0, 0.0)) < 1e-12);

    Rng rng(3);
    const BlaschkeProduct theta = rand_bp(rng, 1, 3);
    const SymbolSpec phi = symbol_uv(rand_bp(rng, 0, 2), rand_bp(rng, 0, 2));
    const OperatorMatrix ct = dtho(conj_symbol(phi), theta, 10, 10, g);
    const OperatorMatrix bt = tho(phi, theta, 10, 10, g);
    REQUIRE(operator_norm(ct.m - bt.m.adjoint()) < 1e-9);

    REQUIRE(operator_norm(dtho(symbol_const(Complex(0.6, 0.8)), z_pow(2), 6, 6, g).m) < 1e-10);
}

TEST_CASE("Toeplitz and Hankel finite sections") {
    const CircleGrid g(256);
    const OperatorMatrix t = toeplitz(symbol_z(), 3, g);
    REQUIRE(std::abs(t.m(1, 0) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(t.m(2, 1) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(std::abs(t.m(0, 0)) < 1e-12);

    REQUIRE(operator_norm(hankel(symbol_z(), 4, 4, g).m) < 1e-12);

    const OperatorMatrix h = hankel(symbol_laurent(-1, {Complex(1.0, 0.0)}), 4, 4, g);
    REQUIRE(std::abs(h.m(0, 0) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("block assembly equals direct compression") {
    const CircleGrid g(512);
    const Frame k = model_basis(z_pow(2), g);
    const Frame w = dual_frame(z_pow(2), 8, 8, g);
    const Frame full = concat_frames(k, w);

    const SymbolSpec one = symbol_const(Complex(1.0, 0.0));
    REQUIRE((block_assemble(one, z_pow(2), 8, 8, g).m - CMat::Identity(18, 18)).cwiseAbs().maxCoeff() <
            1e-10);

    for (const SymbolSpec& phi :
         {symbol_z(), symbol_uv(BlaschkeProduct({Complex(0.3, 0.1)}),
                                BlaschkeProduct({Complex(-0.2, 0.4), Complex(0.1, 0.0)}))}) {
        const OperatorMatrix blocks = block_assemble(phi, z_pow(2), 8, 8, g);
        const OperatorMatrix direct = compress(phi, full, full, g);
        REQUIRE(operator_norm(blocks.m - direct.m) < 1e-10);
    }
}

TEST_CASE("conjugation matrices") {
    const CircleGrid g(256);
    const Frame k2 = model_basis(z_pow(2), g);
    const Conjugation c2 = conjugation_on(k2, z_pow(2), g);
    CMat antidiag = CMat::Zero(2, 2);
    antidiag(0, 1) = antidiag(1, 0) = Complex(1.0, 0.0);
    REQUIRE((c2.u - antidiag).cwiseAbs().maxCoeff() < 1e-12);

    const Frame k3 = model_basis(z_pow(3), g);
    const Conjugation c3 = conjugation_on(k3, z_pow(3), g);
    for (int i = 0; i < 3; ++i)
        REQUIRE(std::abs(c3.u(i, 2 - i) - Complex(1.0, 0.0)) < 1e-12);

    // involution and unitarity for a generic theta, on both frames
    Rng rng(13);
    const BlaschkeProduct theta = rand_bp(rng, 1, 4, 0.7);
    const CircleGrid g2(512);
    const Frame k = model_basis(theta, g2);
    const Conjugation ck = conjugation_on(k, theta, g2);
    REQUIRE((ck.u * ck.u.conjugate() - CMat::Identity(k.dimension(), k.dimension()))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    REQUIRE((ck.u.adjoint() * ck.u - CMat::Identity(k.dimension(), k.dimension()))
                .cwiseAbs()
                .maxCoeff() < 1e-10);

    const Frame w = dual_frame(theta, 10, 10, g2);
    const Conjugation cw = conjugation_on(w, theta, g2);
    REQUIRE((cw.u * cw.u.conjugate() - CMat::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-10);

    REQUIRE_THROWS_AS(conjugation_on(dual_frame(theta, 10, 9, g2), theta, g2),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(conjugation_on(analytic_section(4, g2), theta, g2), std::invalid_argument);
}

TEST_CASE("C-symmetry of truncated Toeplitz operators") {
    Rng rng(19);
    const CircleGrid g(512);
    const BlaschkeProduct theta = rand_bp(rng, 2, 4, 0.7);
    const Frame k = model_basis(theta, g);
    const Conjugation c = conjugation_on(k, theta, g);
    const SymbolSpec phi = symbol_uv(rand_bp(rng, 0, 2, 0.7), rand_bp(rng, 0, 2, 0.7));
    const OperatorMatrix a = tto(phi, theta, g);
    REQUIRE(c_symmetry_residual(a.m, c) < 1e-9);

    // action check on random vectors: A^* x = C A C x
    for (int t = 0; t < 4; ++t) {
        CVec x(k.dimension());
        for (int i = 0; i < x.size(); ++i) x[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const CVec lhs = a.m.adjoint() * x;
        const CVec rhs = c.apply(a.m * c.apply(x));
        REQUIRE((lhs - rhs).norm() < 1e-9);
    }
}

TEST_CASE("compressed shift") {
    const CircleGrid g(256);
    const OperatorMatrix s = compressed_shift(z_pow(4), g);
    for (int j = 0; j < 3; ++j) REQUIRE(std::abs(s.m(j + 1, j) - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(operator_norm(s.m) <= 1.0 + 1e-12);

    Rng rng(23);
    REQUIRE(operator_norm(compressed_shift(rand_bp(rng, 1, 4, 0.7), g).m) <= 1.0 + 1e-10);
}

TEST_CASE("adjoint symmetry of compressions") {
    Rng rng(29);
    const CircleGrid g(512);
    const BlaschkeProduct theta = rand_bp(rng, 1, 3);
    const SymbolSpec phi = symbol_uv(rand_bp(rng, 0, 2), rand_bp(rng, 0, 2));
    REQUIRE(operator_norm(tto(conj_symbol(phi), theta, g).m - tto(phi, theta, g).m.adjoint()) <
            1e-10);
    REQUIRE(operator_norm(dtto(conj_symbol(phi), theta, 12, 12, g).m -
                          dtto(phi, theta, 12, 12, g).m.adjoint()) < 1e-10);
}

TEST_CASE("block identities at a small window") {
    Rng rng(41);
    const int win = 48;
    const BlaschkeProduct theta = rand_bp(rng, 1, 2, 0.4);
    const BlaschkeProduct u1 = rand_bp(rng, 0, 1, 0.4), v1 = rand_bp(rng, 0, 1, 0.4);
    const BlaschkeProduct u2 = rand_bp(rng, 0, 1, 0.4), v2 = rand_bp(rng, 0, 1, 0.4);
    const int pos = win + theta.degree() + u1.degree() + v1.degree() + u2.degree() + v2.degree();
    const CircleGrid g(auto_grid_size(theta.degree() + 4, pos, pos));
    const SymbolSpec p = symbol_uv(u1, v1), q = symbol_uv(u2, v2);

    const double r = std::max({tail_radius(theta), tail_radius(u1), tail_radius(v1),
                               tail_radius(u2), tail_radius(v2)});
    const int maxdeg = theta.degree() + u1.degree() + v1.degree() + u2.degree() + v2.degree();
    const double eps = std::max(10.0 * std::pow(std::max(r, 1e-3), 0.5 * pos - maxdeg), 1e-9);

    const IdentityResiduals res = multiplicative_identity_residuals(p, q, theta, pos, pos, g);
    REQUIRE(res.a <= eps);
    REQUIRE(res.b <= eps);
    REQUIRE(res.d_interior <= eps);

    REQUIRE(hankel_factorization_residual(p, theta, pos, pos, g) <= eps);
}

TEST_CASE("dual section norms approach the sup norm of the symbol") {
    Rng rng(47);
    const BlaschkeProduct theta = rand_bp(rng, 1, 2, 0.5);
    const SymbolSpec phi = symbol_uv(rand_bp(rng, 1, 2, 0.5), rand_bp(rng, 1, 2, 0.5));
    const CircleGrid g(auto_grid_size(8, 64, 64));
    double prev = 0.0;
    for (int win : {16, 32, 64}) {
        const double nrm = operator_norm(dtto(phi, theta, win, win, g).m);
        REQUIRE(nrm >= prev - 1e-12);
        prev = nrm;
    }
    REQUIRE(prev == Approx(1.0).margin(1e-3));
}
