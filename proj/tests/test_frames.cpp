#include <catch_amalgamated.hpp>

#include "mslab/frames.hpp"

using namespace mslab;
using Catch::Approx;

namespace {

CVec monomial(int k, const CircleGrid& g) {
    CVec out(g.size);
    for (int n = 0; n < g.size; ++n) out[n] = std::pow(g.nodes[n], k);
    return out;
}

BlaschkeProduct z_pow(int n) {
    return BlaschkeProduct(std::vector<Complex>(n, Complex(0.0, 0.0)));
}

} // namespace

TEST_CASE("grid construction") {
    REQUIRE_THROWS_AS(CircleGrid(32), std::invalid_argument);
    REQUIRE_THROWS_AS(CircleGrid(100), std::invalid_argument);
    const CircleGrid g(64);
    REQUIRE(std::abs(g.nodes[16] - Complex(0.0, 1.0)) < 1e-15);
}

TEST_CASE("inner product on the grid") {
    const CircleGrid g(256);
    const CVec z = monomial(1, g), one = monomial(0, g);
    REQUIRE(std::abs(inner_product(z, z, g) - Complex(1.0, 0.0)) < 1e-14);
    REQUIRE(std::abs(inner_product(one, z, g)) < 1e-14);

    // constant coefficient of the degree-one product with zero 1/2 is -1/2
    const CVec bh = sample_blaschke(BlaschkeProduct({Complex(0.5, 0.0)}), g);
    REQUIRE(inner_product(bh, one, g).real() == Approx(-0.5).margin(1e-12));

    REQUIRE_THROWS_AS(inner_product(z, CVec(128), g), std::invalid_argument);
}

TEST_CASE("model basis of z^n is the monomial basis") {
    const CircleGrid g(256);
    for (int n : {2, 3}) {
        const Frame f = model_basis(z_pow(n), g);
        REQUIRE(f.dimension() == n);
        for (int k = 0; k < n; ++k)
            REQUIRE((f.basis.row(k).transpose() - monomial(k, g)).norm() < 1e-12);
    }
    REQUIRE_THROWS_AS(model_basis(BlaschkeProduct{}, g), std::invalid_argument);
}

TEST_CASE("reproducing-kernel normalisation at zero 1/2") {
    const CircleGrid g(256);
    const Frame f = model_basis(BlaschkeProduct({Complex(0.5, 0.0)}), g);
    // series oracle: ||sqrt(3)/2 / (1 - z/2)||^2 = (3/4) sum 4^{-k}
    double series = 0.0;
    for (int k = 0; k < 60; ++k) series += 0.75 * std::pow(0.25, k);
    REQUIRE(series == Approx(1.0).margin(1e-15));
    REQUIRE(quadrature_norm(f.basis.row(0).transpose(), g) == Approx(std::sqrt(series)).margin(1e-12));
}

TEST_CASE("model basis is orthonormal for random products") {
    Rng rng(5);
    const CircleGrid g(512);
    for (int t = 0; t < 6; ++t) {
        const Frame f = model_basis(random_blaschke(rng.uniform_int(1, 6), 0.8, rng), g);
        const CMat gram = f.basis.conjugate() * f.basis.transpose() / double(g.size);
        REQUIRE((gram - CMat::Identity(f.dimension(), f.dimension())).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("dual frame layout and orthonormality") {
    const CircleGrid g(256);
    const Frame w = dual_frame(z_pow(2), 2, 1, g);
    REQUIRE(w.dimension() == 3);
    REQUIRE((w.basis.row(0).transpose() - monomial(2, g)).norm() < 1e-12);
    REQUIRE((w.basis.row(1).transpose() - monomial(3, g)).norm() < 1e-12);
    REQUIRE((w.basis.row(2).transpose() - monomial(-1, g)).norm() < 1e-12);

    const Frame w2 = dual_frame(BlaschkeProduct({Complex(0.4, 0.0), Complex(0.0, -0.3)}), 8, 8, g);
    const CMat gram = w2.basis.conjugate() * w2.basis.transpose() / double(g.size);
    REQUIRE((gram - CMat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-9);

    const Frame w3 = dual_frame(z_pow(1), 1, 1, g);
    REQUIRE((w3.basis.row(0).transpose() - monomial(1, g)).norm() < 1e-12);
    REQUIRE((w3.basis.row(1).transpose() - monomial(-1, g)).norm() < 1e-12);

    REQUIRE_THROWS_AS(dual_frame(z_pow(1), 0, 1, g), std::invalid_argument);
}

TEST_CASE("model basis is orthogonal to the dual frame") {
    Rng rng(11);
    const CircleGrid g(512);
    const BlaschkeProduct theta = random_blaschke(3, 0.7, rng);
    const Frame k = model_basis(theta, g);
    const Frame w = dual_frame(theta, 12, 12, g);
    const CMat cross = k.basis.conjugate() * w.basis.transpose() / double(g.size);
    REQUIRE(cross.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("riesz projections") {
    const CircleGrid g(128);
    const CVec f = monomial(1, g) + monomial(-1, g);
    REQUIRE((riesz_project(f, g, RieszHalf::analytic) - monomial(1, g)).norm() < 1e-12);
    REQUIRE(riesz_project(monomial(0, g), g, RieszHalf::antianalytic).norm() < 1e-12);
    REQUIRE((riesz_project(monomial(-2, g), g, RieszHalf::antianalytic) - monomial(-2, g)).norm() <
            1e-12);
}

TEST_CASE("q_theta projection for theta = z^2") {
    const CircleGrid g(128);
    const BlaschkeProduct theta = z_pow(2);
    REQUIRE(q_theta_project(monomial(0, g), theta, g).norm() < 1e-12);
    REQUIRE((q_theta_project(monomial(2, g), theta, g) - monomial(2, g)).norm() < 1e-12);
    REQUIRE((q_theta_project(monomial(-1, g), theta, g) - monomial(-1, g)).norm() < 1e-12);
}

TEST_CASE("P_theta is an orthogonal projection under quadrature") {
    Rng rng(17);
    const CircleGrid g(512);
    const BlaschkeProduct theta = random_blaschke(4, 0.7, rng);
    for (int t = 0; t < 4; ++t) {
        CVec f(g.size), h(g.size);
        for (int n = 0; n < g.size; ++n) {
            // band-limited random trigonometric data
            f[n] = h[n] = Complex(0.0, 0.0);
        }
        for (int m = -20; m <= 20; ++m) {
            const Complex cf(rng.uniform(-1, 1), rng.uniform(-1, 1));
            const Complex ch(rng.uniform(-1, 1), rng.uniform(-1, 1));
            for (int n = 0; n < g.size; ++n) {
                const Complex zm = std::pow(g.nodes[n], m);
                f[n] += cf * zm;
                h[n] += ch * zm;
            }
        }
        const CVec pf = p_theta_project(f, theta, g);
        REQUIRE((p_theta_project(pf, theta, g) - pf).norm() / pf.norm() < 1e-9);
        const CVec ph = p_theta_project(h, theta, g);
        REQUIRE(std::abs(inner_product(pf, h, g) - inner_product(f, ph, g)) < 1e-9);
    }
}

TEST_CASE("q_theta agrees with projection onto the dual frame span") {
    Rng rng(29);
    const CircleGrid g(1024);
    const BlaschkeProduct theta = random_blaschke(3, 0.6, rng);
    const Frame w = dual_frame(theta, 24, 24, g);
    // band-limited inside the truncation window
    CVec f = CVec::Zero(g.size);
    for (int m = -10; m <= 10; ++m) {
        const Complex c(rng.uniform(-1, 1), rng.uniform(-1, 1));
        for (int n = 0; n < g.size; ++n) f[n] += c * std::pow(g.nodes[n], m);
    }
    const CVec via_q = q_theta_project(f, theta, g);
    const CVec via_frame = synthesize(w, analyze(w, f));
    REQUIRE((via_q - via_frame).norm() / f.norm() < 1e-8);
}

TEST_CASE("coefficient vectors synthesize consistently") {
    Rng rng(37);
    const CircleGrid g(512);
    const Frame k = model_basis(random_blaschke(5, 0.7, rng), g);
    CVec coords(5);
    for (int i = 0; i < 5; ++i) coords[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const CVec samples = synthesize(k, coords);
    REQUIRE(quadrature_norm(samples, g) == Approx(coords.norm()).margin(1e-8));
    REQUIRE((analyze(k, samples) - coords).norm() < 1e-9);
}
