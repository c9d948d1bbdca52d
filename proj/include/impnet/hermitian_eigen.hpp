#pragma once

// Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//
// Each rotation first removes the phase of the pivot h(p,q) with a diagonal
// unitary and then applies the classical real Jacobi rotation, so real
// symmetric input stays real throughout.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace impnet {

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k belongs to values[k]
    int sweeps = 0;
};

inline HermitianEigen hermitian_eigendecomposition(ComplexMatrix h, int max_sweeps = 100) {
    if (!h.square()) throw ValidationError("eigendecomposition needs a square matrix");
    const std::size_t n = h.rows();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = frobenius_norm(h);
    for (std::size_t i = 0; i < n; ++i) h(i, i) = h(i, i).real();

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(h(p, q));
        return std::sqrt(s);
    };

    int sweep = 0;
    for (;; ++sweep) {
        if (scale == 0.0 || off_norm() <= eps * scale) break;
        if (sweep == max_sweeps)
            throw ConvergenceError("Jacobi eigensolver did not converge in " + std::to_string(max_sweeps) + " sweeps");

        const double skip = 1e-3 * eps * scale / static_cast<double>(n);
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = h(p, q);
                const double g = std::abs(b);
                if (g <= skip) continue;

                const double a = h(p, p).real();
                const double d = h(q, q).real();
                const Complex phase = std::conj(b / g);  // e^{-i arg b}
                const double tau = (d - a) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // G = diag(1, phase) * [[c, s], [-s, c]]
                const Complex g00 = c, g01 = s, g10 = -s * phase, g11 = c * phase;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex x = h(k, p), y = h(k, q);
                    h(k, p) = x * g00 + y * g10;
                    h(k, q) = x * g01 + y * g11;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex x = h(p, k), y = h(q, k);
                    h(p, k) = std::conj(g00) * x + std::conj(g10) * y;
                    h(q, k) = std::conj(g01) * x + std::conj(g11) * y;
                }
                h(p, q) = h(q, p) = Complex{};
                h(p, p) = a - t * g;
                h(q, q) = d + t * g;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex x = v(k, p), y = v(k, q);
                    v(k, p) = x * g00 + y * g10;
                    v(k, q) = x * g01 + y * g11;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return h(i, i).real() < h(j, j).real(); });

    HermitianEigen out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = h(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace impnet
