#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "netmodel.hpp"

namespace impnet {

/// Angular frequency in rad/s. Always finite and strictly positive.
class AngularFrequency {
public:
    explicit AngularFrequency(double omega) : omega_(omega) {
        if (!std::isfinite(omega) || omega <= 0.0)
            throw ValidationError("angular frequency must be positive and finite, got " + std::to_string(omega));
    }

    static AngularFrequency from_hertz(double hz) { return AngularFrequency(2.0 * std::numbers::pi * hz); }

    double value() const noexcept { return omega_; }

    auto operator<=>(const AngularFrequency&) const = default;

private:
    double omega_;
};

/// Admittance of one element: 1/R, 1/(jwL), jwC or 1/z.
inline Complex branch_admittance(const Element& e, AngularFrequency omega) {
    const double w = omega.value();
    return std::visit(
        [w](const auto& el) -> Complex {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, Resistor>) {
                return {1.0 / el.ohms, 0.0};
            } else if constexpr (std::is_same_v<T, Inductor>) {
                return {0.0, -1.0 / (w * el.henries)};
            } else if constexpr (std::is_same_v<T, Capacitor>) {
                return {0.0, w * el.farads};
            } else {
                if (el.ohms == Complex{}) throw DegenerateElementError("zero impedance has no admittance");
                return Complex{1.0, 0.0} / el.ohms;
            }
        },
        e);
}

/// Complex symmetric Laplacian L(w). Parallel branches are merged by adding
/// admittances; each diagonal entry is the negated sum of its row's
/// off-diagonals, so the constant vector is an exact null vector up to the
/// rounding of that one sum.
inline ComplexMatrix assemble_laplacian(const Network& net, AngularFrequency omega) {
    const std::size_t n = net.node_count();
    ComplexMatrix lap(n, n);
    for (const Branch& b : net.branches()) {
        const Complex y = branch_admittance(b.element, omega);
        const std::size_t lo = std::min(b.node_a, b.node_b);
        const std::size_t hi = std::max(b.node_a, b.node_b);
        lap(lo, hi) -= y;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) lap(j, i) = lap(i, j);
    for (std::size_t i = 0; i < n; ++i) {
        Complex off{};
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) off += lap(i, j);
        lap(i, i) = -off;
    }
    return lap;
}

/// Largest total admittance magnitude incident on one node, summed without
/// cancellation. Bounds the spectral norm of L to within a factor of two and
/// stays meaningful when reactive admittances cancel exactly.
inline double admittance_scale(const Network& net, AngularFrequency omega) {
    std::vector<double> total(net.node_count(), 0.0);
    for (const Branch& b : net.branches()) {
        const double y = std::abs(branch_admittance(b.element, omega));
        total[b.node_a] += y;
        total[b.node_b] += y;
    }
    return *std::max_element(total.begin(), total.end());
}

}  // namespace impnet
