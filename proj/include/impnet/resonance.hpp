#pragma once

// Resonance frequencies: closed forms for LC grids and reactance rings, and a
// numerical sweep that looks for zeros of the smallest nontrivial singular
// value of L(w) for arbitrary networks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hermitian_eigen.hpp"
#include "laplacian.hpp"
#include "matrix.hpp"
#include "netmodel.hpp"
#include "oracle.hpp"
#include "takagi.hpp"

namespace impnet {

enum class ResonanceMethod { Analytic, SweepRefined };

inline const char* to_string(ResonanceMethod m) { return m == ResonanceMethod::Analytic ? "analytic" : "sweep"; }

struct ResonanceReport {
    std::vector<double> omegas;     // ascending, merged
    std::vector<double> residuals;  // minimized statistic per entry, 0 for analytic ones
    ResonanceMethod method = ResonanceMethod::Analytic;
    std::size_t distinct_count = 0;
    std::size_t raw_count = 0;  // before merging
};

inline constexpr double resonance_merge_rel_tol = 1e-9;

namespace detail {

/// Sorts (omega, residual) pairs and collapses runs closer than rel_tol,
/// keeping the entry with the smallest residual.
inline ResonanceReport merge_resonances(std::vector<std::pair<double, double>> found, ResonanceMethod method,
                                        double rel_tol = resonance_merge_rel_tol) {
    std::sort(found.begin(), found.end());
    ResonanceReport r;
    r.method = method;
    r.raw_count = found.size();
    for (const auto& [w, res] : found) {
        if (!r.omegas.empty() && w - r.omegas.back() <= rel_tol * w) {
            if (res < r.residuals.back()) {
                r.omegas.back() = w;
                r.residuals.back() = res;
            }
            continue;
        }
        r.omegas.push_back(w);
        r.residuals.push_back(res);
    }
    r.distinct_count = r.omegas.size();
    return r;
}

inline void require_grid_parameters(std::size_t m, std::size_t n, double inductance, double capacitance) {
    if (m < 2 || n < 2) throw ValidationError("grid needs at least 2 nodes in each direction");
    if (!(inductance > 0.0) || !(capacitance > 0.0) || !std::isfinite(inductance) || !std::isfinite(capacitance))
        throw ValidationError("grid inductance and capacitance must be positive and finite");
}

inline double reactance(const Element& e, AngularFrequency omega) {
    if (const auto* l = std::get_if<Inductor>(&e)) return omega.value() * l->henries;
    if (const auto* c = std::get_if<Capacitor>(&e)) return -1.0 / (omega.value() * c->farads);
    throw ValidationError("ring element must be an inductor or a capacitor");
}

}  // namespace detail

/// Free-boundary M x N LC grid (capacitors along the M direction, inductors
/// along the N direction):
///     w_mn = |sin(n pi / 2N) / sin(m pi / 2M)| / sqrt(LC),  m < M, n < N.
inline ResonanceReport grid_resonances_analytic(std::size_t m, std::size_t n, double inductance, double capacitance) {
    detail::require_grid_parameters(m, n, inductance, capacitance);
    const double pi = std::numbers::pi;
    const double base = 1.0 / std::sqrt(inductance * capacitance);
    std::vector<std::pair<double, double>> found;
    for (std::size_t a = 1; a < m; ++a)
        for (std::size_t b = 1; b < n; ++b)
            found.emplace_back(base * std::abs(std::sin(b * pi / (2.0 * n)) / std::sin(a * pi / (2.0 * m))), 0.0);
    return detail::merge_resonances(std::move(found), ResonanceMethod::Analytic);
}

/// Same grid with periodic wrap in both directions. The cycle Laplacian
/// eigenvalues 4 sin^2(k pi / K) replace the path ones.
inline ResonanceReport toroidal_grid_resonances_analytic(std::size_t m, std::size_t n, double inductance,
                                                         double capacitance) {
    detail::require_grid_parameters(m, n, inductance, capacitance);
    const double pi = std::numbers::pi;
    const double base = 1.0 / std::sqrt(inductance * capacitance);
    std::vector<std::pair<double, double>> found;
    for (std::size_t a = 1; a < m; ++a)
        for (std::size_t b = 1; b < n; ++b)
            found.emplace_back(base * std::abs(std::sin(b * pi / n) / std::sin(a * pi / m)), 0.0);
    return detail::merge_resonances(std::move(found), ResonanceMethod::Analytic);
}

struct RingResonanceCheck {
    bool is_resonant = false;
    double reactance_sum = 0.0;
};

/// A ring of reactances x_k resonates when sum x_k = 0.
inline RingResonanceCheck ring_reactance_resonance_check(const std::vector<Element>& elements, AngularFrequency omega) {
    RingResonanceCheck r;
    double total_abs = 0.0;
    for (const Element& e : elements) {
        const double x = detail::reactance(e, omega);
        r.reactance_sum += x;
        total_abs += std::abs(x);
    }
    r.is_resonant = std::abs(r.reactance_sum) <= 1e-9 * total_abs;
    return r;
}

/// Product of the nonzero Laplacian eigenvalues of a reactance ring, taken as
/// N times the grounded minor determinant, against the closed form
///     N (-j)^(N-1) (x_1 + ... + x_N) / (x_1 ... x_N).
/// Returns the relative deviation.
inline double eigenvalue_product_identity_check(const std::vector<Element>& elements, AngularFrequency omega) {
    const std::size_t n = elements.size();
    if (n < 3) throw ValidationError("ring needs at least 3 elements");
    double sum = 0.0, total_abs = 0.0;
    Complex closed{1.0, 0.0};
    for (const Element& e : elements) {
        const double x = detail::reactance(e, omega);
        sum += x;
        total_abs += std::abs(x);
        closed /= x;
    }
    if (std::abs(sum) <= 1e-8 * total_abs)
        throw NearSingularError("reactance sum vanishes: ring is at or near resonance");
    for (std::size_t k = 0; k + 1 < n; ++k) closed *= Complex{0.0, -1.0};
    closed *= static_cast<double>(n) * sum;

    const Network ring = ring_network(n, elements);
    const GroundedSystem g = ground_node(assemble_laplacian(ring, omega), n - 1);
    const Complex product = static_cast<double>(n) * lu_determinant(lu_factorize(g.reduced_matrix));
    return std::abs(product - closed) / std::abs(closed);
}

/// Smallest singular value squared of L(w) restricted to the complement of the
/// constant vector. Computed as |L psi|^2 from the minimizing vector rather
/// than read off the eigenvalue, which keeps it accurate down to ~eps^2.
inline double smallest_nontrivial_sigma(const Network& net, AngularFrequency omega, int max_sweeps = 100) {
    const std::size_t n = net.node_count();
    if (n < 2) return 0.0;
    const ComplexMatrix lap = assemble_laplacian(net, omega);
    const ComplexMatrix q = detail::complement_basis(constant_unit_vector(n));
    const ComplexMatrix lq = lap * q;
    ComplexMatrix h = adjoint(lq) * lq;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        h(i, i) = h(i, i).real();
        for (std::size_t j = i + 1; j < h.cols(); ++j) h(j, i) = std::conj(h(i, j));
    }
    const HermitianEigen eig = hermitian_eigendecomposition(std::move(h), max_sweeps);

    // Eigenvalues within rounding of the smallest one are not resolved by the
    // solve above; redo the minimization on their span with a Gram matrix
    // built from L times the vectors, whose entries carry relative accuracy.
    const double band = eig.values.front() + 1e3 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                                                 std::max(eig.values.back(), 0.0);
    std::size_t k = 1;
    while (k < eig.values.size() && eig.values[k] <= band) ++k;
    ComplexMatrix basis(n - 1, k);
    for (std::size_t j = 0; j < k; ++j) basis.set_column(j, eig.vectors.column(j));
    const ComplexMatrix w = lq * basis;
    ComplexMatrix gram = adjoint(w) * w;
    for (std::size_t i = 0; i < k; ++i) {
        gram(i, i) = gram(i, i).real();
        for (std::size_t j = i + 1; j < k; ++j) gram(j, i) = std::conj(gram(i, j));
    }
    const HermitianEigen small = hermitian_eigendecomposition(std::move(gram), max_sweeps);
    const double s = norm2(w * small.vectors.column(0));
    return s * s;
}

/// Log-spaced grid of `points` angular frequencies, both ends included exactly.
inline std::vector<double> log_sweep_grid(double lo, double hi, std::size_t points) {
    std::vector<double> w(points);
    const double ratio = hi / lo;
    for (std::size_t i = 0; i < points; ++i)
        w[i] = lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(points - 1));
    w.back() = hi;
    return w;
}

struct SweepSample {
    double omega;
    double sigma;
};

inline std::vector<SweepSample> sample_smallest_sigma(const Network& net, double lo, double hi, std::size_t points) {
    std::vector<SweepSample> out;
    out.reserve(points);
    for (double w : log_sweep_grid(lo, hi, points)) out.push_back({w, smallest_nontrivial_sigma(net, AngularFrequency(w))});
    return out;
}

namespace detail {

/// Golden-section minimum of f over [a, b] in log w, to relative w tolerance.
template <typename F>
std::pair<double, double> golden_minimize_log(F&& f, double a, double b, double rel_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x0 = std::log(a), x3 = std::log(b);
    double x1 = x3 - inv_phi * (x3 - x0);
    double x2 = x0 + inv_phi * (x3 - x0);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    while (x3 - x0 > rel_tol) {
        if (f1 <= f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - inv_phi * (x3 - x0);
            f1 = f(std::exp(x1));
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + inv_phi * (x3 - x0);
            f2 = f(std::exp(x2));
        }
    }
    return f1 <= f2 ? std::pair{std::exp(x1), f1} : std::pair{std::exp(x2), f2};
}

}  // namespace detail

inline constexpr double sweep_detection_ratio = 1e-6;
inline constexpr double sweep_refine_rel_tol = 1e-10;

/// Scans [lo, hi] for zeros of the smallest nontrivial sigma. Discrete local
/// minima of the sampled statistic are candidates; with `refine` each is
/// polished by golden section inside its neighbouring grid interval. A
/// candidate is accepted when its (refined) statistic is at most 1e-6 times the
/// median over the grid.
inline ResonanceReport sweep_resonances(const Network& net, AngularFrequency omega_lo, AngularFrequency omega_hi,
                                        std::size_t points, bool refine = true) {
    if (!(omega_lo < omega_hi)) throw ValidationError("sweep range must satisfy lo < hi");
    if (points < 3) throw ValidationError("sweep needs at least 3 points");

    const std::vector<SweepSample> samples = sample_smallest_sigma(net, omega_lo.value(), omega_hi.value(), points);
    std::vector<double> sorted;
    sorted.reserve(points);
    for (const auto& s : samples) sorted.push_back(s.sigma);
    std::nth_element(sorted.begin(), sorted.begin() + points / 2, sorted.end());
    double median = sorted[points / 2];
    if (points % 2 == 0) {
        const double below = *std::max_element(sorted.begin(), sorted.begin() + points / 2);
        median = 0.5 * (median + below);
    }
    const double threshold = sweep_detection_ratio * median;

    auto stat = [&](double w) { return smallest_nontrivial_sigma(net, AngularFrequency(w)); };
    std::vector<std::pair<double, double>> found;
    for (std::size_t i = 0; i < points; ++i) {
        const double here = samples[i].sigma;
        const bool left_ok = i == 0 || here <= samples[i - 1].sigma;
        const bool right_ok = i + 1 == points || here <= samples[i + 1].sigma;
        if (!left_ok || !right_ok) continue;
        double w = samples[i].omega, s = here;
        if (refine) {
            const double a = samples[i == 0 ? 0 : i - 1].omega;
            const double b = samples[i + 1 == points ? i : i + 1].omega;
            const auto [wr, sr] = detail::golden_minimize_log(stat, a, b, sweep_refine_rel_tol);
            if (sr < s) {
                w = wr;
                s = sr;
            }
        }
        if (s <= threshold) found.emplace_back(w, s);
    }
    return detail::merge_resonances(std::move(found), ResonanceMethod::SweepRefined);
}

}  // namespace impnet
