#pragma once

// Reference impedances from a direct solve of the grounded Kirchhoff system
// L V = I. Shares nothing with the spectral path beyond Laplacian assembly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "laplacian.hpp"
#include "matrix.hpp"
#include "netmodel.hpp"

namespace impnet {

/// PA = LU with partial pivoting, stored in place (unit lower triangle implied).
struct LuFactorization {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;  // row perm[i] of A is row i of PA
    double min_pivot = 0.0;
    int sign = 1;
};

inline LuFactorization lu_factorize(ComplexMatrix a) {
    if (!a.square()) throw ValidationError("LU needs a square matrix");
    const std::size_t n = a.rows();
    LuFactorization f;
    f.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
    f.min_pivot = n ? std::numeric_limits<double>::infinity() : 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        const Complex pivot = a(k, k);
        f.min_pivot = std::min(f.min_pivot, std::abs(pivot));
        if (pivot == Complex{}) continue;
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex m = a(i, k) / pivot;
            a(i, k) = m;
            if (m == Complex{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
        }
    }
    f.lu = std::move(a);
    return f;
}

inline ComplexVector lu_solve(const LuFactorization& f, std::span<const Complex> b) {
    const std::size_t n = f.lu.rows();
    ComplexVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = b[f.perm[i]];
        for (std::size_t j = 0; j < i; ++j) acc -= f.lu(i, j) * x[j];
        x[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
        Complex acc = x[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= f.lu(i, j) * x[j];
        x[i] = acc / f.lu(i, i);
    }
    return x;
}

inline Complex lu_determinant(const LuFactorization& f) {
    Complex det = static_cast<double>(f.sign);
    for (std::size_t i = 0; i < f.lu.rows(); ++i) det *= f.lu(i, i);
    return det;
}

/// Kirchhoff system with the potential of one node pinned to zero.
struct GroundedSystem {
    ComplexMatrix reduced_matrix;  // L without the ground row and column
    std::size_t ground;

    /// Position of a non-ground node inside the reduced system.
    std::size_t reduced_index(std::size_t node) const { return node < ground ? node : node - 1; }
};

inline GroundedSystem ground_node(const ComplexMatrix& lap, std::size_t ground) {
    const std::size_t n = lap.rows();
    GroundedSystem g{ComplexMatrix(n - 1, n - 1), ground};
    for (std::size_t i = 0, ri = 0; i < n; ++i) {
        if (i == ground) continue;
        for (std::size_t j = 0, rj = 0; j < n; ++j) {
            if (j == ground) continue;
            g.reduced_matrix(ri, rj++) = lap(i, j);
        }
        ++ri;
    }
    return g;
}

/// Returned instead of an impedance when the grounded system is singular to
/// working precision, which is how a resonance shows up in a direct solve.
struct SingularSystem {
    double pivot_ratio;
};

struct DirectSolution {
    Complex impedance;
    ComplexVector potentials;  // all nodes, ground included (zero)
    double pivot_ratio;
};

using DirectResult = std::variant<DirectSolution, SingularSystem>;

inline constexpr double singular_pivot_ratio = 1e-13;

/// Unit current injected at p and extracted at q, potentials measured against
/// the chosen ground node. Z_pq = V_p - V_q.
inline DirectResult solve_direct_grounded(const Network& net, AngularFrequency omega, std::size_t p, std::size_t q,
                                          std::size_t ground) {
    const std::size_t n = net.node_count();
    if (p >= n || q >= n || ground >= n) throw InvalidNodeError("node index out of range");
    if (p == q) throw InvalidNodeError("impedance needs two distinct nodes");

    const ComplexMatrix lap = assemble_laplacian(net, omega);
    const GroundedSystem g = ground_node(lap, ground);
    // Scale taken from the element admittances so that an exact cancellation
    // (L = 0 at an LC resonance) still counts as singular.
    const double scale = std::max(max_abs(g.reduced_matrix), admittance_scale(net, omega));
    const LuFactorization f = lu_factorize(g.reduced_matrix);
    const double ratio = scale > 0.0 ? f.min_pivot / scale : 0.0;
    if (ratio < singular_pivot_ratio) return SingularSystem{ratio};

    ComplexVector current(n - 1);
    if (p != ground) current[g.reduced_index(p)] += 1.0;
    if (q != ground) current[g.reduced_index(q)] -= 1.0;
    const ComplexVector v = lu_solve(f, current);

    DirectSolution sol;
    sol.potentials.assign(n, Complex{});
    for (std::size_t i = 0; i < n; ++i)
        if (i != ground) sol.potentials[i] = v[g.reduced_index(i)];
    sol.impedance = sol.potentials[p] - sol.potentials[q];
    sol.pivot_ratio = ratio;
    return sol;
}

/// Grounds q, so Z_pq is simply V_p.
inline DirectResult solve_direct(const Network& net, AngularFrequency omega, std::size_t p, std::size_t q) {
    return solve_direct_grounded(net, omega, p, q, q);
}

/// Current-balance residual of a solved system: max |I_a| over nodes other than
/// p and q, plus |I_p - 1| and |I_q + 1|, where I = L V.
inline double check_current_conservation(const Network& net, AngularFrequency omega, std::span<const Complex> potentials,
                                         std::size_t p, std::size_t q) {
    const ComplexMatrix lap = assemble_laplacian(net, omega);
    if (potentials.size() != lap.rows()) throw ValidationError("potential vector has the wrong length");
    const ComplexVector current = lap * potentials;
    double worst = 0.0;
    for (std::size_t a = 0; a < current.size(); ++a)
        if (a != p && a != q) worst = std::max(worst, std::abs(current[a]));
    return worst + std::abs(current[p] - 1.0) + std::abs(current[q] + 1.0);
}

}  // namespace impnet
