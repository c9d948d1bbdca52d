#pragma once

// Two-point impedance from the Takagi factorization of the Laplacian:
//
//     Z_pq = sum over modes with lambda != 0 of (u_p - u_q)^2 / lambda
//
// The square is the analytic square of a complex number. The trivial mode
// (constant vector) drops out; any further vanishing mode is a resonance and
// makes Z_pq infinite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "laplacian.hpp"
#include "matrix.hpp"
#include "netmodel.hpp"
#include "takagi.hpp"

namespace impnet {

struct ImpedanceOptions {
    double zero_rel_tol = 1e-10;
    double degeneracy_rel_tol = 1e-8;
    int max_sweeps = 100;
};

enum class ImpedanceStatus { Finite, Resonant };

inline const char* to_string(ImpedanceStatus s) { return s == ImpedanceStatus::Finite ? "finite" : "resonant"; }

struct ImpedanceResult {
    ImpedanceStatus status = ImpedanceStatus::Finite;
    /// Sum over the nonzero modes. When Resonant this is the principal part
    /// only and is reported for diagnostics.
    Complex value{};
    std::size_t resonant_mode_count = 0;
    /// max |(u_p - u_q)^2| over the nontrivial zero modes; set when Resonant.
    std::optional<double> divergent_coefficient;
    AngularFrequency omega{1.0};
    /// Smallest nonzero sigma lies within 10x of the zero threshold.
    bool near_resonance = false;

    bool finite() const noexcept { return status == ImpedanceStatus::Finite; }
};

/// Factorized network at one frequency; reusable for any number of node pairs.
struct NetworkSpectrum {
    ComplexMatrix laplacian;
    TakagiDecomposition decomposition;
    ZeroModeClassification zero_modes;
    AngularFrequency omega{1.0};

    std::size_t node_count() const noexcept { return decomposition.order; }
};

inline NetworkSpectrum analyze_network(const Network& net, AngularFrequency omega, const ImpedanceOptions& opt = {}) {
    NetworkSpectrum s{assemble_laplacian(net, omega), {}, {}, omega};
    s.decomposition = takagi_decompose(s.laplacian, {opt.degeneracy_rel_tol, opt.max_sweeps});

    const double y = admittance_scale(net, omega);
    const double reference_sigma = y * y;
    s.zero_modes = classify_zero_modes(s.decomposition, opt.zero_rel_tol, reference_sigma);
    if (s.zero_modes.trivial_overlap < 1.0 - 1e-8) {
        s.decomposition = align_trivial_zero_mode(s.laplacian, std::move(s.decomposition), s.zero_modes);
        s.zero_modes = classify_zero_modes(s.decomposition, opt.zero_rel_tol, reference_sigma);
    }
    return s;
}

inline void check_node_pair(std::size_t node_count, std::size_t p, std::size_t q) {
    if (p >= node_count || q >= node_count)
        throw InvalidNodeError("node index out of range (network has " + std::to_string(node_count) + " nodes)");
}

inline ImpedanceResult impedance_between(const NetworkSpectrum& s, std::size_t p, std::size_t q) {
    check_node_pair(s.node_count(), p, q);
    const TakagiDecomposition& d = s.decomposition;
    const ZeroModeClassification& zero = s.zero_modes;

    ImpedanceResult r;
    r.omega = s.omega;
    r.resonant_mode_count = zero.nontrivial_zero_count;
    if (p == q) return r;  // no potential difference between a node and itself

    double smallest_nonzero = -1.0;
    double divergent = 0.0;
    Complex sum{};
    for (std::size_t a = 0; a < d.order; ++a) {
        const Complex diff = d.u(p, a) - d.u(q, a);
        if (d.sigma[a] <= zero.threshold) {
            if (a != zero.trivial_index) divergent = std::max(divergent, std::abs(diff * diff));
            continue;
        }
        if (smallest_nonzero < 0.0) smallest_nonzero = d.sigma[a];
        sum += diff * diff / d.lambda[a];
    }

    r.value = sum;
    r.near_resonance = smallest_nonzero >= 0.0 && smallest_nonzero <= 10.0 * zero.threshold;
    if (zero.nontrivial_zero_count > 0) {
        r.status = ImpedanceStatus::Resonant;
        r.divergent_coefficient = divergent;
    }
    return r;
}

inline ImpedanceResult two_point_impedance(const Network& net, AngularFrequency omega, std::size_t p, std::size_t q,
                                           const ImpedanceOptions& opt = {}) {
    check_node_pair(net.node_count(), p, q);
    if (p == q) throw InvalidNodeError("impedance needs two distinct nodes");
    return impedance_between(analyze_network(net, omega, opt), p, q);
}

/// Symmetric table of impedances over all node pairs, sharing one factorization.
class ImpedanceTable {
public:
    explicit ImpedanceTable(std::size_t n) : n_(n), entries_(n * n) {}

    std::size_t size() const noexcept { return n_; }
    const ImpedanceResult& operator()(std::size_t p, std::size_t q) const { return entries_[p * n_ + q]; }
    ImpedanceResult& operator()(std::size_t p, std::size_t q) { return entries_[p * n_ + q]; }

private:
    std::size_t n_;
    std::vector<ImpedanceResult> entries_;
};

inline ImpedanceTable impedance_matrix(const Network& net, AngularFrequency omega, const ImpedanceOptions& opt = {}) {
    const NetworkSpectrum s = analyze_network(net, omega, opt);
    const std::size_t n = net.node_count();
    ImpedanceTable table(n);
    for (std::size_t p = 0; p < n; ++p) {
        table(p, p) = impedance_between(s, p, p);
        for (std::size_t q = p + 1; q < n; ++q) {
            table(p, q) = impedance_between(s, p, q);
            table(q, p) = table(p, q);
        }
    }
    return table;
}

}  // namespace impnet
