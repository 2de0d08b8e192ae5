#pragma once

#include "mslab/symbols.hpp"

#include <Eigen/SVD>

namespace mslab {

/// Matrix of a compression of multiplication by a symbol, tagged with the
/// frames it acts between. Entry (j, i) = <phi * e_i, f_j> under quadrature.
struct OperatorMatrix {
    CMat m;
    std::string domain_id, codomain_id;
    std::string symbol;

    int rows() const { return static_cast<int>(m.rows()); }
    int cols() const { return static_cast<int>(m.cols()); }
};

inline Eigen::VectorXd singular_values(const CMat& m) {
    if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd();
    if (std::min(m.rows(), m.cols()) <= 16) return Eigen::JacobiSVD<CMat>(m).singularValues();
    return Eigen::BDCSVD<CMat>(m).singularValues();
}

inline double operator_norm(const CMat& m) {
    const Eigen::VectorXd sv = singular_values(m);
    return sv.size() ? sv[0] : 0.0;
}

inline OperatorMatrix adjoint(const OperatorMatrix& op) {
    return {op.m.adjoint(), op.codomain_id, op.domain_id, "conj(" + op.symbol + ")*"};
}

/// Single compression engine; every named operator below delegates here.
inline OperatorMatrix compress(const SymbolSpec& phi, const Frame& domain, const Frame& codomain,
                               const CircleGrid& grid) {
    if (domain.grid_size != grid.size || codomain.grid_size != grid.size)
        throw std::invalid_argument("compress: frames and grid disagree");
    const CVec ps = phi.sample(grid);
    OperatorMatrix op;
    op.m = (codomain.basis.conjugate() * ps.asDiagonal()) * domain.basis.transpose() /
           static_cast<double>(grid.size);
    op.domain_id = domain.id;
    op.codomain_id = codomain.id;
    op.symbol = phi.descriptor();
    return op;
}

inline OperatorMatrix compress(const CVec& phi_samples, const Frame& domain,
                               const Frame& codomain, const CircleGrid& grid,
                               const std::string& descriptor = "sampled") {
    if (domain.grid_size != grid.size || codomain.grid_size != grid.size)
        throw std::invalid_argument("compress: frames and grid disagree");
    OperatorMatrix op;
    op.m = (codomain.basis.conjugate() * phi_samples.asDiagonal()) * domain.basis.transpose() /
           static_cast<double>(grid.size);
    op.domain_id = domain.id;
    op.codomain_id = codomain.id;
    op.symbol = descriptor;
    return op;
}

/// A_phi on K_theta.
inline OperatorMatrix tto(const SymbolSpec& phi, const BlaschkeProduct& theta,
                          const CircleGrid& grid) {
    const Frame k = model_basis(theta, grid);
    return compress(phi, k, k, grid);
}

/// Finite section of D_phi on the truncated K_theta-orthocomplement window.
inline OperatorMatrix dtto(const SymbolSpec& phi, const BlaschkeProduct& theta, int pos, int neg,
                           const CircleGrid& grid) {
    const Frame w = dual_frame(theta, pos, neg, grid);
    return compress(phi, w, w, grid);
}

/// B_phi : K_theta -> K_theta-orthocomplement window.
inline OperatorMatrix tho(const SymbolSpec& phi, const BlaschkeProduct& theta, int pos, int neg,
                          const CircleGrid& grid) {
    return compress(phi, model_basis(theta, grid), dual_frame(theta, pos, neg, grid), grid);
}

/// C_phi : K_theta-orthocomplement window -> K_theta.
inline OperatorMatrix dtho(const SymbolSpec& phi, const BlaschkeProduct& theta, int pos, int neg,
                           const CircleGrid& grid) {
    return compress(phi, dual_frame(theta, pos, neg, grid), model_basis(theta, grid), grid);
}

/// Standard Toeplitz finite section on {1, ..., z^{n-1}}.
inline OperatorMatrix toeplitz(const SymbolSpec& phi, int n, const CircleGrid& grid) {
    const Frame h = analytic_section(n, grid);
    return compress(phi, h, h, grid);
}

/// Standard Hankel finite section {1..z^{n-1}} -> {z^{-1}..z^{-m}}.
inline OperatorMatrix hankel(const SymbolSpec& phi, int n, int m, const CircleGrid& grid) {
    return compress(phi, analytic_section(n, grid), antianalytic_section(m, grid), grid);
}

/// Compressed shift S_theta = A_z.
inline OperatorMatrix compressed_shift(const BlaschkeProduct& theta, const CircleGrid& grid) {
    return tto(symbol_z(), theta, grid);
}

/// Full multiplication-operator block [[A, C], [B, D]] on K_theta (+) window.
inline OperatorMatrix block_assemble(const SymbolSpec& phi, const BlaschkeProduct& theta, int pos,
                                     int neg, const CircleGrid& grid) {
    const Frame k = model_basis(theta, grid);
    const Frame w = dual_frame(theta, pos, neg, grid);
    const CVec ps = phi.sample(grid);
    const OperatorMatrix a = compress(ps, k, k, grid);
    const OperatorMatrix b = compress(ps, k, w, grid);
    const OperatorMatrix c = compress(ps, w, k, grid);
    const OperatorMatrix d = compress(ps, w, w, grid);
    const int dk = k.dimension(), dw = w.dimension();
    OperatorMatrix op;
    op.m.resize(dk + dw, dk + dw);
    op.m.topLeftCorner(dk, dk) = a.m;
    op.m.topRightCorner(dk, dw) = c.m;
    op.m.bottomLeftCorner(dw, dk) = b.m;
    op.m.bottomRightCorner(dw, dw) = d.m;
    const std::string cid = "concat[" + k.id + "|" + w.id + "]";
    op.domain_id = op.codomain_id = cid;
    op.symbol = phi.descriptor();
    return op;
}

/// Antilinear conjugation f -> theta * conj(z f) as a matrix: the action on
/// coordinates is x -> U * conj(x).
struct Conjugation {
    CMat u;
    std::string frame_id;

    CVec apply(const CVec& x) const { return u * x.conjugate(); }
};

inline Conjugation conjugation_on(const Frame& frame, const BlaschkeProduct& theta,
                                  const CircleGrid& grid) {
    if (frame.kind != FrameKind::model_basis && frame.kind != FrameKind::dual_frame)
        throw std::invalid_argument("conjugation_on: frame must be a model basis or dual frame");
    if (to_text(frame.theta) != to_text(theta))
        throw std::invalid_argument("conjugation_on: frame belongs to a different theta");
    if (frame.kind == FrameKind::dual_frame && frame.pos != frame.neg)
        throw std::invalid_argument("conjugation_on: truncated span is conjugation-invariant only for pos == neg");
    const CVec ts = sample_blaschke(theta, grid);
    // rows of cb hold theta * conj(z e_i) sampled on the grid
    const CMat cb = (frame.basis * grid.nodes.asDiagonal()).conjugate() * ts.asDiagonal();
    Conjugation c;
    c.u = frame.basis.conjugate() * cb.transpose() / static_cast<double>(grid.size);
    c.frame_id = frame.id;
    return c;
}

/// Indices of the central half of a dual-frame window (the coordinates far
/// from both truncation edges).
inline std::vector<int> interior_indices(int pos, int neg) {
    std::vector<int> idx;
    for (int j = 0; j < pos / 2; ++j) idx.push_back(j);
    for (int k = 0; k < neg / 2; ++k) idx.push_back(pos + k);
    return idx;
}

inline CMat restrict_columns(const CMat& m, const std::vector<int>& columns) {
    CMat r(m.rows(), static_cast<Eigen::Index>(columns.size()));
    for (size_t c = 0; c < columns.size(); ++c) r.col(c) = m.col(columns[c]);
    return r;
}

/// Residuals of the three block identities tying A, B and D together:
///   a:  A_{pq} - A_p A_q                 = B_conj(p)^* B_q        (on K_theta)
///   b:  B_{pq} - D_p B_q                 = B_p A_q
///   d:  D_{pq} - D_p D_q                 = B_p B_conj(q)^*        (interior columns)
struct IdentityResiduals {
    double a = 0.0, b = 0.0, d_interior = 0.0;
};

inline IdentityResiduals multiplicative_identity_residuals(const SymbolSpec& p,
                                                           const SymbolSpec& q,
                                                           const BlaschkeProduct& theta, int pos,
                                                           int neg, const CircleGrid& grid) {
    const Frame k = model_basis(theta, grid);
    const Frame w = dual_frame(theta, pos, neg, grid);
    const SymbolSpec pq = symbol_product(p, q);
    const CMat a_p = compress(p, k, k, grid).m;
    const CMat a_q = compress(q, k, k, grid).m;
    const CMat a_pq = compress(pq, k, k, grid).m;
    const CMat b_p = compress(p, k, w, grid).m;
    const CMat b_q = compress(q, k, w, grid).m;
    const CMat b_pq = compress(pq, k, w, grid).m;
    const CMat b_pc = compress(conj_symbol(p), k, w, grid).m;
    const CMat b_qc = compress(conj_symbol(q), k, w, grid).m;
    const CMat d_p = compress(p, w, w, grid).m;
    const CMat d_q = compress(q, w, w, grid).m;
    const CMat d_pq = compress(pq, w, w, grid).m;

    IdentityResiduals r;
    r.a = operator_norm(a_pq - a_p * a_q - b_pc.adjoint() * b_q);
    r.b = operator_norm(b_pq - d_p * b_q - b_p * a_q);
    const CMat d_defect = d_pq - d_p * d_q - b_p * b_qc.adjoint();
    r.d_interior = operator_norm(restrict_columns(d_defect, interior_indices(pos, neg)));
    return r;
}

/// Residual of the truncated-Hankel factorization of B_phi on K_theta:
///   B_phi = H_phi H_conj(theta)^* H_conj(theta) + M_theta H_conj(phi)^* H_conj(theta),
/// assembled from Hankel finite sections (n = pos, m = neg) and the exact
/// index embeddings of the monomial sections into the dual-frame window.
inline double hankel_factorization_residual(const SymbolSpec& phi, const BlaschkeProduct& theta,
                                            int pos, int neg, const CircleGrid& grid) {
    const Frame k = model_basis(theta, grid);
    const Frame w = dual_frame(theta, pos, neg, grid);
    const Frame h2 = analytic_section(pos, grid);
    const Frame h2c = antianalytic_section(neg, grid);

    const SymbolSpec theta_bar = symbol_uv(theta, BlaschkeProduct{});
    const CMat embed = compress(symbol_const(Complex(1.0, 0.0)), k, h2, grid).m;  // K_theta -> H^2 window
    const CMat h_tb = compress(theta_bar, h2, h2c, grid).m;
    const CMat h_phi = compress(phi, h2, h2c, grid).m;
    const CMat h_phic = compress(conj_symbol(phi), h2, h2c, grid).m;

    // index embeddings into the window: theta z^j sits at slot j, z^{-k} at pos+k-1
    CMat into_plus = CMat::Zero(pos + neg, pos);
    into_plus.topRows(pos) = CMat::Identity(pos, pos);
    CMat into_minus = CMat::Zero(pos + neg, neg);
    into_minus.bottomRows(neg) = CMat::Identity(neg, neg);

    const CMat lhs = compress(phi, k, w, grid).m;
    const CMat rhs = into_minus * (h_phi * (h_tb.adjoint() * (h_tb * embed))) +
                     into_plus * (h_phic.adjoint() * (h_tb * embed));
    return operator_norm(lhs - rhs);
}

/// || A^H - U conj(A) conj(U) ||: the matrix form of A^* = C A C.
inline double c_symmetry_residual(const CMat& a, const Conjugation& c) {
    return operator_norm(a.adjoint() - c.u * a.conjugate() * c.u.conjugate());
}

} // namespace mslab
