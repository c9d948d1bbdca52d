#pragma once

// Takagi factorization of a complex symmetric matrix through the Hermitian
// eigenproblem of L^H L.
//
// For every eigenvalue sigma of L^H L we produce orthonormal u with
//
//     L u = lambda u^*,   lambda = sqrt(sigma) e^{i theta}.
//
// A nondegenerate eigenvector of L^H L already satisfies this relation and
// only its phase theta has to be read off. Inside a degenerate cluster with
// basis Psi the reduced matrix B = Psi^T L Psi obeys B B^* = sigma I, and the
// vectors are built from v = (B c)^* + sqrt(sigma) e^{i theta} c, which
// satisfies B v = sqrt(sigma) e^{i theta} v^* for any c and theta. The first
// vector is split off, the orthogonal complement (which B maps into its own
// conjugate) is reduced again, and so on down to a pair, which is handled with
// the two-vector construction plus one Gram-Schmidt step.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hermitian_eigen.hpp"
#include "matrix.hpp"

namespace impnet {

struct TakagiOptions {
    /// Consecutive sigma values closer than this (relative to the larger one)
    /// are treated as one degenerate cluster.
    double degeneracy_rel_tol = 1e-8;
    int max_sweeps = 100;
};

struct TakagiDecomposition {
    std::size_t order = 0;
    ComplexMatrix u;              // column alpha holds u_alpha
    std::vector<Complex> lambda;  // L u_alpha = lambda_alpha conj(u_alpha)
    std::vector<double> sigma;    // |lambda_alpha|^2, ascending
    double residual = 0.0;        // max_alpha |L u_alpha - lambda_alpha conj(u_alpha)|

    ComplexVector vector(std::size_t alpha) const { return u.column(alpha); }
};

struct ZeroModeClassification {
    std::vector<std::size_t> zero_indices;
    std::size_t trivial_index = 0;
    std::size_t nontrivial_zero_count = 0;
    double threshold = 0.0;
    double trivial_overlap = 0.0;   // |<u_trivial, psi_1>|
    double subspace_overlap = 0.0;  // norm of psi_1 projected onto the zero modes
};

namespace detail {

inline Complex unit_phase(Complex z) {
    const double a = std::abs(z);
    return a == 0.0 ? Complex{1.0, 0.0} : z / a;
}

/// Base phase and four offsets by pi/4.
inline const std::array<Complex, 5>& trial_phases() {
    constexpr double h = std::numbers::sqrt2 / 2.0;
    static const std::array<Complex, 5> phases = {
        Complex{1.0, 0.0}, Complex{h, h}, Complex{0.0, 1.0}, Complex{-h, h}, Complex{-1.0, 0.0}};
    return phases;
}

/// Columns k = 1..n-1 complete the unit vector w to an orthonormal basis.
/// Returned as an n x (n-1) matrix.
inline ComplexMatrix complement_basis(const ComplexVector& w) {
    const std::size_t n = w.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(w[a]) < std::abs(w[b]); });

    std::vector<ComplexVector> basis{w};
    for (std::size_t idx = 0; idx + 1 < n; ++idx) {
        ComplexVector e(n);
        e[order[idx]] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const Complex proj = dot(b, e);
                for (std::size_t i = 0; i < n; ++i) e[i] -= proj * b[i];
            }
        }
        const double nrm = norm2(e);
        for (auto& x : e) x /= nrm;
        basis.push_back(std::move(e));
    }

    ComplexMatrix q(n, n - 1);
    for (std::size_t j = 1; j < n; ++j) q.set_column(j - 1, basis[j]);
    return q;
}

/// v = conj(B c) + s * phase * c
inline ComplexVector construction_vector(const ComplexMatrix& b, const ComplexVector& c, double s, Complex phase) {
    ComplexVector v = conj(std::span<const Complex>(b * c));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * phase * c[i];
    return v;
}

inline ComplexVector unit_vector(std::size_t n, std::size_t k) {
    ComplexVector e(n);
    e[k] = 1.0;
    return e;
}

/// Takagi vectors of a k x k symmetric B with B B^* = s^2 I, as the columns of
/// a k x k unitary matrix.
inline ComplexMatrix degenerate_cluster_vectors(const ComplexMatrix& b, double s) {
    const std::size_t k = b.rows();
    if (k == 1) return ComplexMatrix::identity(1);

    const double floor = 1e-10 * s;

    // First vector from c = e_0, keeping the trial phase with the largest |v|.
    const ComplexVector e0 = unit_vector(k, 0);
    ComplexVector best;
    double best_norm = -1.0;
    Complex phase1{};
    for (const Complex& ph : trial_phases()) {
        ComplexVector v = construction_vector(b, e0, s, ph);
        const double nv = norm2(v);
        if (nv > best_norm) {
            best_norm = nv;
            best = std::move(v);
            phase1 = ph;
        }
    }
    if (best_norm <= floor)
        throw DegenerateConstructionError("cluster construction vanished for every trial phase");
    ComplexVector u1 = best;
    for (auto& x : u1) x /= best_norm;

    ComplexMatrix out(k, k);
    out.set_column(0, u1);

    if (k == 2) {
        // Second vector: v2 = conj(B e_1) + s e^{i theta_2} e_1 with
        // e^{i(theta_1 - theta_2)} = +-1, then one Gram-Schmidt step against u1.
        // With theta_2 = theta_1 the overlap (v2, u1) is real and with
        // theta_2 = theta_1 + pi it is imaginary, which is exactly the phase
        // condition that keeps the projected vector a Takagi vector.
        const ComplexVector e1 = unit_vector(k, 1);
        ComplexVector best_y;
        double best_y_norm = -1.0;
        for (const Complex& ph : {phase1, -phase1}) {
            ComplexVector y = construction_vector(b, e1, s, ph);
            const Complex proj = dot(u1, y);
            for (std::size_t i = 0; i < k; ++i) y[i] -= proj * u1[i];
            const double ny = norm2(y);
            if (ny > best_y_norm) {
                best_y_norm = ny;
                best_y = std::move(y);
            }
        }
        if (best_y_norm <= floor)
            throw DegenerateConstructionError("second cluster vector vanished for both admissible phases");
        for (auto& x : best_y) x /= best_y_norm;
        out.set_column(1, best_y);
        return out;
    }

    // B maps the complement of u1 into the conjugate complement, so the
    // reduced matrix Q^T B Q is again symmetric with the same singular value.
    const ComplexMatrix q = complement_basis(u1);
    ComplexMatrix reduced = transpose(q) * (b * q);
    for (std::size_t i = 0; i < reduced.rows(); ++i)
        for (std::size_t j = i + 1; j < reduced.cols(); ++j)
            reduced(i, j) = reduced(j, i) = 0.5 * (reduced(i, j) + reduced(j, i));
    const ComplexMatrix inner = degenerate_cluster_vectors(reduced, s);
    const ComplexMatrix lifted = q * inner;
    for (std::size_t j = 0; j + 1 < k; ++j)
        for (std::size_t i = 0; i < k; ++i) out(i, j + 1) = lifted(i, j);
    return out;
}

/// Phase-canonicalizes each u (largest component real positive, lambda
/// absorbs the squared phase), sorts by sigma and computes the residual.
inline void finalize(const ComplexMatrix& l, TakagiDecomposition& d) {
    const std::size_t n = d.order;
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t top = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(d.u(i, a)) > std::abs(d.u(top, a))) top = i;
        const double mag = std::abs(d.u(top, a));
        if (mag == 0.0) continue;
        const Complex gauge = std::conj(d.u(top, a)) / mag;
        for (std::size_t i = 0; i < n; ++i) d.u(i, a) *= gauge;
        d.u(top, a) = mag;
        d.lambda[a] *= gauge * gauge;
    }

    d.sigma.resize(n);
    for (std::size_t a = 0; a < n; ++a) d.sigma[a] = std::norm(d.lambda[a]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d.sigma[i] < d.sigma[j]; });
    TakagiDecomposition sorted;
    sorted.order = n;
    sorted.u = ComplexMatrix(n, n);
    sorted.lambda.resize(n);
    sorted.sigma.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted.lambda[k] = d.lambda[order[k]];
        sorted.sigma[k] = d.sigma[order[k]];
        for (std::size_t i = 0; i < n; ++i) sorted.u(i, k) = d.u(i, order[k]);
    }

    double residual = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const ComplexVector ua = sorted.u.column(a);
        ComplexVector r = l * ua;
        for (std::size_t i = 0; i < n; ++i) r[i] -= sorted.lambda[a] * std::conj(ua[i]);
        residual = std::max(residual, norm2(r));
    }
    sorted.residual = residual;
    d = std::move(sorted);
}

/// lambda for a vector u of the decomposition: magnitude |L u|, phase of u^T L u.
inline Complex lambda_of(const ComplexVector& u, const ComplexVector& lu) {
    return norm2(lu) * unit_phase(bilinear(u, lu));
}

}  // namespace detail

inline void require_symmetric(const ComplexMatrix& l) {
    if (!l.square()) throw NotSymmetricError("matrix is not square");
    const double tol = 1e-13 * frobenius_norm(l);
    for (std::size_t i = 0; i < l.rows(); ++i)
        for (std::size_t j = i + 1; j < l.cols(); ++j)
            if (std::abs(l(i, j) - l(j, i)) > tol)
                throw NotSymmetricError("matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) +
                                        ")");
}

inline TakagiDecomposition takagi_decompose(const ComplexMatrix& l, const TakagiOptions& opt = {}) {
    require_symmetric(l);
    const std::size_t n = l.rows();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    ComplexMatrix h = adjoint(l) * l;
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = h(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (h(i, j) + std::conj(h(j, i)));
            h(i, j) = avg;
            h(j, i) = std::conj(avg);
        }
    }
    const HermitianEigen eig = hermitian_eigendecomposition(std::move(h), opt.max_sweeps);

    std::vector<double> sig(n);
    for (std::size_t k = 0; k < n; ++k) sig[k] = std::max(0.0, eig.values[k]);
    const double sig_max = n ? sig.back() : 0.0;
    const double l_norm = frobenius_norm(l);
    // Below this level the eigenvalues of L^H L are rounding noise.
    const double noise = std::max(16.0 * static_cast<double>(n) * eps * sig_max, 1e-300 * l_norm * l_norm);

    TakagiDecomposition d;
    d.order = n;
    d.u = ComplexMatrix(n, n);
    d.lambda.assign(n, Complex{});

    std::size_t begin = 0;
    while (begin < n) {
        std::size_t end = begin + 1;
        while (end < n) {
            const bool both_noise = sig[end] <= noise && sig[end - 1] <= noise;
            const bool close = sig[end] - sig[end - 1] <= opt.degeneracy_rel_tol * std::max(sig[end], noise);
            if (!both_noise && !close) break;
            ++end;
        }
        const std::size_t k = end - begin;

        if (sig[end - 1] <= noise) {
            // Numerically null modes: any orthonormal basis of the span will do.
            for (std::size_t a = begin; a < end; ++a) {
                const ComplexVector psi = eig.vectors.column(a);
                d.u.set_column(a, psi);
                d.lambda[a] = detail::lambda_of(psi, l * psi);
            }
        } else if (k == 1) {
            const ComplexVector psi = eig.vectors.column(begin);
            const ComplexVector lpsi = l * psi;
            std::size_t top = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(psi[i]) > std::abs(psi[top])) top = i;
            const Complex ratio = lpsi[top] / std::conj(psi[top]);
            d.u.set_column(begin, psi);
            d.lambda[begin] = norm2(lpsi) * detail::unit_phase(ratio);
        } else {
            ComplexMatrix psi(n, k);
            double mean_sigma = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                psi.set_column(j, eig.vectors.column(begin + j));
                mean_sigma += sig[begin + j];
            }
            mean_sigma /= static_cast<double>(k);
            ComplexMatrix reduced = transpose(psi) * (l * psi);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    reduced(i, j) = reduced(j, i) = 0.5 * (reduced(i, j) + reduced(j, i));
            const ComplexMatrix c = detail::degenerate_cluster_vectors(reduced, std::sqrt(mean_sigma));
            const ComplexMatrix lifted = psi * c;
            for (std::size_t j = 0; j < k; ++j) {
                const ComplexVector u = lifted.column(j);
                d.u.set_column(begin + j, u);
                d.lambda[begin + j] = detail::lambda_of(u, l * u);
            }
        }
        begin = end;
    }

    detail::finalize(l, d);
    return d;
}

/// Zero modes are those with sigma <= zero_rel_tol * max(sigma_max,
/// reference_sigma). reference_sigma lets a caller supply the magnitude scale
/// of L when cancellations make the computed sigma_max itself small.
inline ZeroModeClassification classify_zero_modes(const TakagiDecomposition& d, double zero_rel_tol = 1e-10,
                                                  double reference_sigma = 0.0) {
    ZeroModeClassification c;
    const double sig_max = d.sigma.empty() ? 0.0 : d.sigma.back();
    c.threshold = zero_rel_tol * std::max(sig_max, reference_sigma);
    for (std::size_t a = 0; a < d.order; ++a)
        if (d.sigma[a] <= c.threshold) c.zero_indices.push_back(a);
    if (c.zero_indices.empty()) throw NoTrivialZeroError("no zero mode: input is not a network Laplacian");

    const ComplexVector psi1 = constant_unit_vector(d.order);
    double sum_sq = 0.0;
    for (std::size_t a : c.zero_indices) {
        const double ov = std::abs(dot(d.vector(a), psi1));
        sum_sq += ov * ov;
        if (ov > c.trivial_overlap) {
            c.trivial_overlap = ov;
            c.trivial_index = a;
        }
    }
    c.subspace_overlap = std::sqrt(sum_sq);
    if (c.subspace_overlap < 0.99)
        throw NoTrivialZeroError("no zero mode overlaps the constant vector (overlap " +
                                 std::to_string(c.subspace_overlap) + ")");
    c.nontrivial_zero_count = c.zero_indices.size() - 1;
    return c;
}

/// Rotates the zero-mode subspace so that its first vector is the constant
/// vector (projected onto the subspace). Any unitary mix of zero modes is
/// again a valid set of zero modes, so this only fixes a gauge; it matters
/// when several modes vanish and the eigensolver returned an arbitrary basis.
inline TakagiDecomposition align_trivial_zero_mode(const ComplexMatrix& l, TakagiDecomposition d,
                                                   const ZeroModeClassification& zero) {
    const std::size_t z = zero.zero_indices.size();
    const std::size_t n = d.order;
    const ComplexVector psi1 = constant_unit_vector(n);

    ComplexVector coeff(z);
    for (std::size_t j = 0; j < z; ++j) coeff[j] = dot(d.vector(zero.zero_indices[j]), psi1);
    const double cn = norm2(coeff);
    for (auto& x : coeff) x /= cn;

    ComplexMatrix rot(z, z);
    rot.set_column(0, coeff);
    if (z > 1) {
        const ComplexMatrix rest = detail::complement_basis(coeff);
        for (std::size_t j = 1; j < z; ++j)
            for (std::size_t i = 0; i < z; ++i) rot(i, j) = rest(i, j - 1);
    }

    ComplexMatrix old(n, z);
    for (std::size_t j = 0; j < z; ++j) old.set_column(j, d.vector(zero.zero_indices[j]));
    const ComplexMatrix fresh = old * rot;
    for (std::size_t j = 0; j < z; ++j) {
        const ComplexVector u = fresh.column(j);
        d.u.set_column(zero.zero_indices[j], u);
        d.lambda[zero.zero_indices[j]] = detail::lambda_of(u, l * u);
    }
    detail::finalize(l, d);
    return d;
}

}  // namespace impnet
