#pragma once

#include "mslab/operators.hpp"

#include <vector>

namespace mslab {

/// Orthonormal coordinate frame for a subspace of a Frame's coordinate space.
struct Subspace {
    CMat basis;  // columns orthonormal
    std::string frame_id;

    int dim() const { return static_cast<int>(basis.cols()); }
};

/// Partial-isometry verdict. The defect equals ||T T* T - T|| through the
/// algebraic identity defect = max over singular values of |s^3 - s|.
struct PiVerdict {
    double defect = 0.0;
    bool is_pi = false;
    double tol_used = 0.0;
    Eigen::VectorXd singular_values;
};

inline PiVerdict pi_defect(const OperatorMatrix& op, double tol) {
    PiVerdict v;
    v.tol_used = tol;
    v.singular_values = singular_values(op.m);
    for (Eigen::Index i = 0; i < v.singular_values.size(); ++i) {
        const double s = v.singular_values[i];
        v.defect = std::max(v.defect, std::abs(s * s * s - s));
    }
    v.is_pi = v.defect <= tol;
    return v;
}

/// ||(T T* T - T) restricted to the given columns||; the finite-section
/// defect test for windowed operators.
inline double interior_pi_defect(const OperatorMatrix& op, const std::vector<int>& columns) {
    const CMat e = op.m * op.m.adjoint() * op.m - op.m;
    CMat r(e.rows(), static_cast<Eigen::Index>(columns.size()));
    for (size_t c = 0; c < columns.size(); ++c) r.col(c) = e.col(columns[c]);
    return operator_norm(r);
}

/// Finite-section tolerance: leakage past the window is geometric in the tail
/// radius; the floor keeps the tolerance above dense-linear-algebra noise.
inline double eps_tail(int window, double r, int maxdeg, double floor_val = 1e-9) {
    const double expo = 0.5 * window - maxdeg;
    if (r <= 0.0) return floor_val;
    if (expo <= 0.0) return std::max(10.0, floor_val);
    return std::max(10.0 * std::pow(r, expo), floor_val);
}

inline CMat orthonormalize_columns(const CMat& m, double cutoff = 1e-8) {
    if (m.cols() == 0) return CMat(m.rows(), 0);
    Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeThinU);
    int rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()[rank] > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

/// Right null space of m with the given absolute singular-value cutoff.
inline CMat nullspace(const CMat& m, double cutoff = 1e-8) {
    if (m.rows() == 0) return CMat::Identity(m.cols(), m.cols());
    Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeFullV);
    int rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()[rank] > cutoff) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

/// Span of right singular vectors with s > 1/2. For a partial isometry the
/// singular values cluster at {0, 1}; mass in [tol, 1-tol] means the operator
/// is not numerically a partial isometry and is rejected.
inline Subspace initial_space(const OperatorMatrix& op, double tol) {
    Eigen::BDCSVD<CMat> svd(op.m, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int count = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] >= tol && sv[i] <= 1.0 - tol)
            throw std::runtime_error("initial_space: singular value in the mid-band; operator is not numerically a partial isometry");
        if (sv[i] > 0.5) ++count;
    }
    return {svd.matrixV().leftCols(count), op.domain_id};
}

/// Span of right singular vectors with s >= ||T|| - tol (top singular
/// subspace; the extremal vectors of the matrix).
inline Subspace extremal_space(const OperatorMatrix& op, double tol) {
    Eigen::BDCSVD<CMat> svd(op.m, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] < 1e-14)
        throw std::invalid_argument("extremal_space: zero operator");
    int count = 0;
    while (count < sv.size() && sv[count] >= sv[0] - tol) ++count;
    return {svd.matrixV().leftCols(count), op.domain_id};
}

struct PrincipalAngles {
    std::vector<double> angles;  // ascending
    int dim1 = 0, dim2 = 0;

    double largest() const { return angles.empty() ? 0.0 : angles.back(); }
};

/// arccos of the singular values of basis1^H basis2, clamped to [0, 1].
inline PrincipalAngles principal_angles(const Subspace& s1, const Subspace& s2) {
    if (s1.frame_id != s2.frame_id)
        throw std::invalid_argument("principal_angles: subspaces live in different frames");
    PrincipalAngles out;
    out.dim1 = s1.dim();
    out.dim2 = s2.dim();
    if (out.dim1 == 0 || out.dim2 == 0) return out;
    const Eigen::VectorXd sv = singular_values(CMat(s1.basis.adjoint() * s2.basis));
    out.angles.resize(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        out.angles[i] = std::acos(std::clamp(sv[i], 0.0, 1.0));
    return out;
}

inline double residual_outside(const Subspace& s, const CVec& x) {
    if (s.dim() == 0) return x.norm();
    return (x - s.basis * (s.basis.adjoint() * x)).norm();
}

inline Subspace direct_sum(const Subspace& a, const Subspace& b) {
    if (a.frame_id != b.frame_id)
        throw std::invalid_argument("direct_sum: subspaces live in different frames");
    Subspace s;
    s.frame_id = a.frame_id;
    s.basis.resize(a.basis.rows(), a.dim() + b.dim());
    s.basis.leftCols(a.dim()) = a.basis;
    s.basis.rightCols(b.dim()) = b.basis;
    return s;
}

/// Monic numerator polynomial prod (z - a_i), ascending coefficients.
inline std::vector<Complex> numerator_coeffs(const BlaschkeProduct& b) {
    std::vector<Complex> c{Complex(1.0, 0.0)};
    for (const Complex& a : b.zeros()) {
        std::vector<Complex> next(c.size() + 1, Complex(0.0, 0.0));
        for (size_t k = 0; k < c.size(); ++k) {
            next[k] -= a * c[k];
            next[k + 1] += c[k];
        }
        c = std::move(next);
    }
    return c;
}

/// Predicted initial space of A_{conj(u) v} on K_theta: with w = gcd(u, v) and
/// w1 = u / w, the set {f in K_theta, f in w1 H^2, v f in K_{u theta}},
/// realised as an intersection of numerical null spaces.
inline Subspace predicted_initial_space(const BlaschkeProduct& u, const BlaschkeProduct& v,
                                        const BlaschkeProduct& theta, const CircleGrid& grid,
                                        int window = 104, double cutoff = 1e-8) {
    const Frame k = model_basis(theta, grid);
    const BlaschkeProduct w = gcd(u, v);
    const BlaschkeProduct w1 = divide_out(u, w);
    const BlaschkeProduct utheta = multiply(u, theta);

    const int pos = window + utheta.degree() + v.degree();
    const Frame target = dual_frame(utheta, pos, 1, grid);
    CMat qmap = compress(symbol_inner(v), k, target, grid).m;

    CMat stacked;
    if (w1.degree() >= 1) {
        const CMat pmap = compress(symbol_const(Complex(1.0, 0.0)), k, model_basis(w1, grid), grid).m;
        stacked.resize(pmap.rows() + qmap.rows(), k.dimension());
        stacked.topRows(pmap.rows()) = pmap;
        stacked.bottomRows(qmap.rows()) = qmap;
    } else {
        stacked = std::move(qmap);
    }
    return {nullspace(stacked, cutoff), k.id};
}

/// Window intersection of theta u H^2 with the dual-frame span: the span of
/// theta * N_u(z) * z^j for j = 0 .. pos-1-deg(u), N_u the monic numerator of
/// u. Exact polynomial coordinates, so no edge leakage; the last deg(u)
/// window slots are given up, as the bookkeeping reports.
inline Subspace predicted_extremal_plus(const BlaschkeProduct& u, const Frame& dual) {
    if (dual.kind != FrameKind::dual_frame)
        throw std::invalid_argument("predicted_extremal_plus: needs a dual frame");
    const auto n = numerator_coeffs(u);
    const int d = u.degree();
    const int count = std::max(0, dual.pos - d);
    CMat coords = CMat::Zero(dual.dimension(), count);
    for (int j = 0; j < count; ++j)
        for (int k = 0; k <= d; ++k) coords(j + k, j) = n[k];
    return {orthonormalize_columns(coords), dual.id};
}

/// Window intersection of conj(z v H^2): span of conj(z N_v(z) z^j) for
/// j = 0 .. neg-1-deg(v).
inline Subspace predicted_extremal_minus(const BlaschkeProduct& v, const Frame& dual) {
    if (dual.kind != FrameKind::dual_frame)
        throw std::invalid_argument("predicted_extremal_minus: needs a dual frame");
    const auto n = numerator_coeffs(v);
    const int d = v.degree();
    const int count = std::max(0, dual.neg - d);
    CMat coords = CMat::Zero(dual.dimension(), count);
    for (int j = 0; j < count; ++j)
        for (int k = 0; k <= d; ++k) coords(dual.pos + j + k, j) = std::conj(n[k]);
    return {orthonormalize_columns(coords), dual.id};
}

/// Sedlock-class symbol phi + conj(alpha S_theta C(phi)) + c for phi in
/// K_theta given by model-basis coordinates.
inline SymbolSpec sedlock_symbol(const CVec& phi_coords, const Complex& alpha, const Complex& c,
                                 const BlaschkeProduct& theta, const CircleGrid& grid) {
    const Frame k = model_basis(theta, grid);
    if (phi_coords.size() != k.dimension())
        throw std::invalid_argument("sedlock_symbol: coordinate count mismatch");
    const Conjugation conj_op = conjugation_on(k, theta, grid);
    const CVec phi_tilde = conj_op.apply(phi_coords);
    const CVec conj_coords = alpha * (compressed_shift(theta, grid).m * phi_tilde);
    return SymbolSpec(SedlockSymbol{theta, phi_coords, conj_coords, c},
                      "sedlock[" + to_text(theta) + "]");
}

/// psi / (1 - alpha conj(theta)); requires |alpha| < 1 so the denominator is
/// bounded away from 0 on the circle.
inline SymbolSpec alpha_symbol(const std::variant<BlaschkeProduct, LaurentSymbol>& numerator,
                               const Complex& alpha, const BlaschkeProduct& theta) {
    return SymbolSpec(AlphaQuotientSymbol{numerator, alpha, theta},
                      "alpha[" + to_text(theta) + "]");
}

/// Smallest singular value of the injectivity section of T_phi: domain
/// {1..z^{n-1}}, codomain padded by `pad` slots so that the image of the edge
/// columns is not clipped. Bounded away from zero exactly when T_phi is
/// injective with closed range.
inline double toeplitz_injectivity_floor(const SymbolSpec& phi, int n, int pad,
                                         const CircleGrid& grid) {
    const OperatorMatrix t =
        compress(phi, analytic_section(n, grid), analytic_section(n + pad, grid), grid);
    const Eigen::VectorXd sv = singular_values(t.m);
    return sv[sv.size() - 1];
}

/// l^2 mass of the strictly positive Fourier modes; "co-analytic" means the
/// returned mass is <= 1e-8.
inline double coanalyticity_check(const SymbolSpec& phi, const CircleGrid& grid) {
    const CVec hat = fft(phi.sample(grid)) / static_cast<double>(grid.size);
    double mass2 = 0.0;
    for (int k = 1; k < grid.size / 2; ++k) mass2 += std::norm(hat[k]);
    return std::sqrt(mass2);
}

} // namespace mslab
