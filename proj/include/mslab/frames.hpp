#pragma once

#include "mslab/blaschke.hpp"
#include "mslab/grid.hpp"

#include <string>
#include <utility>

namespace mslab {

enum class FrameKind { model_basis, dual_frame, analytic_section, antianalytic_section, concat };

inline CVec sample_blaschke(const BlaschkeProduct& b, const CircleGrid& grid) {
    CVec out(grid.size);
    for (int n = 0; n < grid.size; ++n) out[n] = b.eval_unchecked(grid.nodes[n]);
    return out;
}

/// Takenaka-Malmquist function for the zero list a_0..a_{d-1} of theta,
/// in stored order:
///   e_k(z) = sqrt(1-|a_k|^2)/(1 - conj(a_k) z) * prod_{j<k} (z-a_j)/(1-conj(a_j) z)
inline Complex tm_basis_eval(const BlaschkeProduct& theta, int k, const Complex& z) {
    const auto& a = theta.zeros();
    Complex w = std::sqrt(1.0 - std::norm(a[k])) / (1.0 - std::conj(a[k]) * z);
    for (int j = 0; j < k; ++j) w *= (z - a[j]) / (1.0 - std::conj(a[j]) * z);
    return w;
}

/// An ordered orthonormal family sampled on the grid; rows of `basis` are the
/// basis functions. Frames are immutable after construction and compared by id.
struct Frame {
    FrameKind kind = FrameKind::model_basis;
    CMat basis;      // dimension x grid size
    int grid_size = 0;
    std::string id;
    BlaschkeProduct theta;  // model/dual metadata; constant 1 otherwise
    int pos = 0, neg = 0;   // dual split / section sizes

    int dimension() const { return static_cast<int>(basis.rows()); }
};

/// Orthonormal basis of K_theta (dimension = deg theta).
inline Frame model_basis(const BlaschkeProduct& theta, const CircleGrid& grid) {
    const int d = theta.degree();
    if (d < 1) throw std::invalid_argument("model_basis: theta must be non-constant");
    Frame f;
    f.kind = FrameKind::model_basis;
    f.grid_size = grid.size;
    f.theta = theta;
    f.basis.resize(d, grid.size);
    for (int n = 0; n < grid.size; ++n) {
        const Complex z = grid.nodes[n];
        const auto& a = theta.zeros();
        // shared running product keeps the column O(d) instead of O(d^2)
        Complex prefix(1.0, 0.0);
        for (int k = 0; k < d; ++k) {
            f.basis(k, n) = prefix * std::sqrt(1.0 - std::norm(a[k])) / (1.0 - std::conj(a[k]) * z);
            prefix *= (z - a[k]) / (1.0 - std::conj(a[k]) * z);
        }
    }
    f.id = "model[" + to_text(theta) + "]g" + std::to_string(grid.size);
    return f;
}

/// Ordered basis (theta z^0, ..., theta z^{pos-1}, z^{-1}, ..., z^{-neg}) of
/// the truncated K_theta-orthocomplement window.
inline Frame dual_frame(const BlaschkeProduct& theta, int pos, int neg, const CircleGrid& grid) {
    if (pos < 1 || neg < 1) throw std::invalid_argument("dual_frame: pos and neg must be >= 1");
    Frame f;
    f.kind = FrameKind::dual_frame;
    f.grid_size = grid.size;
    f.theta = theta;
    f.pos = pos;
    f.neg = neg;
    f.basis.resize(pos + neg, grid.size);
    const CVec ts = sample_blaschke(theta, grid);
    for (int n = 0; n < grid.size; ++n) {
        const Complex z = grid.nodes[n];
        Complex p = ts[n];
        for (int j = 0; j < pos; ++j) {
            f.basis(j, n) = p;
            p *= z;
        }
        const Complex zinv = std::conj(z);  // |z| = 1
        Complex q = zinv;
        for (int k = 0; k < neg; ++k) {
            f.basis(pos + k, n) = q;
            q *= zinv;
        }
    }
    f.id = "dual[" + to_text(theta) + ";" + std::to_string(pos) + ";" + std::to_string(neg) +
           "]g" + std::to_string(grid.size);
    return f;
}

/// Monomial section {1, z, ..., z^{n-1}} of H^2.
inline Frame analytic_section(int n, const CircleGrid& grid) {
    if (n < 1) throw std::invalid_argument("analytic_section: n must be >= 1");
    Frame f;
    f.kind = FrameKind::analytic_section;
    f.grid_size = grid.size;
    f.basis.resize(n, grid.size);
    for (int c = 0; c < grid.size; ++c) {
        Complex p(1.0, 0.0);
        for (int j = 0; j < n; ++j) {
            f.basis(j, c) = p;
            p *= grid.nodes[c];
        }
    }
    f.id = "h2[" + std::to_string(n) + "]g" + std::to_string(grid.size);
    return f;
}

/// Monomial section {z^{-1}, ..., z^{-m}} of the H^2 orthocomplement.
inline Frame antianalytic_section(int m, const CircleGrid& grid) {
    if (m < 1) throw std::invalid_argument("antianalytic_section: m must be >= 1");
    Frame f;
    f.kind = FrameKind::antianalytic_section;
    f.grid_size = grid.size;
    f.basis.resize(m, grid.size);
    for (int c = 0; c < grid.size; ++c) {
        const Complex zinv = std::conj(grid.nodes[c]);
        Complex p = zinv;
        for (int j = 0; j < m; ++j) {
            f.basis(j, c) = p;
            p *= zinv;
        }
    }
    f.id = "h2c[" + std::to_string(m) + "]g" + std::to_string(grid.size);
    return f;
}

inline Frame concat_frames(const Frame& a, const Frame& b) {
    if (a.grid_size != b.grid_size)
        throw std::invalid_argument("concat_frames: grid mismatch");
    Frame f;
    f.kind = FrameKind::concat;
    f.grid_size = a.grid_size;
    f.basis.resize(a.dimension() + b.dimension(), a.grid_size);
    f.basis.topRows(a.dimension()) = a.basis;
    f.basis.bottomRows(b.dimension()) = b.basis;
    f.id = "concat[" + a.id + "|" + b.id + "]";
    return f;
}

/// Coordinates of a function in a frame's basis order.
struct CoefVector {
    CVec coords;
    std::string frame_id;
};

inline CVec synthesize(const Frame& frame, const CVec& coords) {
    if (coords.size() != frame.dimension())
        throw std::invalid_argument("synthesize: coordinate count mismatch");
    return frame.basis.transpose() * coords;
}

inline CVec analyze(const Frame& frame, const CVec& samples) {
    if (samples.size() != frame.grid_size)
        throw std::invalid_argument("analyze: sample count mismatch");
    return frame.basis.conjugate() * samples / static_cast<double>(frame.grid_size);
}

/// Q_theta = I - P + M_theta P M_conj(theta), applied literally via Riesz
/// projections and pointwise multiplication by theta samples.
inline CVec q_theta_project(const CVec& samples, const BlaschkeProduct& theta,
                            const CircleGrid& grid) {
    const CVec ts = sample_blaschke(theta, grid);
    const CVec analytic = riesz_project(samples, grid, RieszHalf::analytic);
    const CVec inner = riesz_project(ts.conjugate().cwiseProduct(samples), grid, RieszHalf::analytic);
    return samples - analytic + ts.cwiseProduct(inner);
}

inline CVec p_theta_project(const CVec& samples, const BlaschkeProduct& theta,
                            const CircleGrid& grid) {
    return samples - q_theta_project(samples, theta, grid);
}

} // namespace mslab
