#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace impnet;
using testsupport::sqrt3;

TEST(Impedance, Triangle) {
    const Network tri = testsupport::triangle();
    const AngularFrequency w(1.0);
    const std::tuple<std::size_t, std::size_t, Complex> cases[] = {
        {0, 1, {3.0, sqrt3}}, {1, 2, {3.0, -sqrt3}}, {2, 0, {0.0, 0.0}}};
    for (const auto& [p, q, z] : cases) {
        const ImpedanceResult r = two_point_impedance(tri, w, p, q);
        EXPECT_TRUE(r.finite());
        EXPECT_NEAR(r.value.real(), z.real(), 1e-12);
        EXPECT_NEAR(r.value.imag(), z.imag(), 1e-12);
        EXPECT_EQ(r.resonant_mode_count, 0u);
        EXPECT_FALSE(r.divergent_coefficient.has_value());
    }
}

TEST(Impedance, RingClosedForm) {
    const std::size_t n = 4;
    const Network ring = ring_network(n, std::vector<Element>(n, FixedImpedance{{1.0, 0.0}}));
    const ImpedanceResult r = two_point_impedance(ring, AngularFrequency(1.0), 0, 1);
    EXPECT_NEAR(r.value.real(), 0.75, 1e-14);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-14);
}

TEST(Impedance, ParallelLcResonant) {
    const ImpedanceResult r = two_point_impedance(testsupport::lc_parallel(2.0, 0.5), AngularFrequency(1.0), 0, 1);
    EXPECT_EQ(r.status, ImpedanceStatus::Resonant);
    EXPECT_EQ(r.resonant_mode_count, 1u);
    ASSERT_TRUE(r.divergent_coefficient.has_value());
    EXPECT_NEAR(*r.divergent_coefficient, 2.0, 1e-12);  // (1/sqrt2 + 1/sqrt2)^2
}

TEST(Impedance, ParallelLcOffResonance) {
    // y = jwC + 1/(jwL) at w = 2: j(2 - 1/2) = 1.5j, so Z = -j/1.5
    const ImpedanceResult r = two_point_impedance(testsupport::lc_parallel(1.0, 1.0), AngularFrequency(2.0), 0, 1);
    EXPECT_TRUE(r.finite());
    EXPECT_NEAR(r.value.real(), 0.0, 1e-14);
    EXPECT_NEAR(r.value.imag(), -1.0 / 1.5, 1e-14);
}

TEST(Impedance, SingleResistor) {
    const ImpedanceResult r = two_point_impedance(Network(2, {{0, 1, Resistor{5.0}}}), AngularFrequency(3.0), 1, 0);
    EXPECT_TRUE(r.finite());
    EXPECT_NEAR(r.value.real(), 5.0, 1e-13);
    EXPECT_EQ(r.value.imag(), 0.0);
}

TEST(Impedance, NodeErrors) {
    const Network tri = testsupport::triangle();
    EXPECT_THROW(two_point_impedance(tri, AngularFrequency(1.0), 0, 0), InvalidNodeError);
    EXPECT_THROW(two_point_impedance(tri, AngularFrequency(1.0), 0, 3), InvalidNodeError);
}

TEST(Impedance, NearResonanceFlag) {
    const Network lc = testsupport::lc_parallel(1.0, 1.0);
    // sigma of the nontrivial mode ~ (2 delta)^2 * 4 relative to 4: flag when
    // within 10x of the 1e-10 threshold.
    const ImpedanceResult near = two_point_impedance(lc, AngularFrequency(1.0 + 1e-5), 0, 1);
    EXPECT_TRUE(near.finite());
    EXPECT_TRUE(near.near_resonance);
    const ImpedanceResult far = two_point_impedance(lc, AngularFrequency(1.1), 0, 1);
    EXPECT_FALSE(far.near_resonance);
}

TEST(Impedance, SymmetricCouplingCanVanish) {
    // Balanced bridge at resonance: the resonant mode lives on the two arms
    // and does not separate the symmetric pair of outer nodes.
    const Network net(4, {{0, 1, Inductor{1.0}},
                          {1, 3, Capacitor{1.0}},
                          {0, 2, Capacitor{1.0}},
                          {2, 3, Inductor{1.0}},
                          {0, 3, Resistor{1.0}}});
    const NetworkSpectrum s = analyze_network(net, AngularFrequency(1.0));
    EXPECT_GT(s.zero_modes.nontrivial_zero_count, 0u);
    const ImpedanceResult r = impedance_between(s, 0, 3);
    EXPECT_EQ(r.status, ImpedanceStatus::Resonant);
    ASSERT_TRUE(r.divergent_coefficient.has_value());
}

TEST(ImpedanceMatrix, TriangleTable) {
    const ImpedanceTable t = impedance_matrix(testsupport::triangle(), AngularFrequency(1.0));
    ASSERT_EQ(t.size(), 3u);
    for (std::size_t p = 0; p < 3; ++p) {
        EXPECT_EQ(t(p, p).value, Complex{});
        EXPECT_TRUE(t(p, p).finite());
        for (std::size_t q = 0; q < 3; ++q) EXPECT_EQ(t(p, q).value, t(q, p).value);
    }
    EXPECT_NEAR(t(0, 1).value.imag(), sqrt3, 1e-12);
    EXPECT_NEAR(t(1, 2).value.imag(), -sqrt3, 1e-12);
    EXPECT_NEAR(std::abs(t(2, 0).value), 0.0, 1e-12);
}

TEST(ImpedanceMatrix, MatchesPairwiseCalls) {
    std::mt19937_64 rng(21);
    const Network net = testsupport::random_resistor_network(rng, 5, 5);
    const AngularFrequency w(1.0);
    const ImpedanceTable t = impedance_matrix(net, w);
    for (std::size_t p = 0; p < 5; ++p)
        for (std::size_t q = p + 1; q < 5; ++q)
            EXPECT_LE(std::abs(t(p, q).value - two_point_impedance(net, w, p, q).value),
                      1e-12 * std::abs(t(p, q).value));
}

TEST(ImpedanceProperties, ResistorNetworks) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 40; ++trial) {
        const Network net = testsupport::random_resistor_network(rng);
        const std::size_t n = net.node_count();
        const ImpedanceTable t = impedance_matrix(net, AngularFrequency(1.0));
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                if (p == q) continue;
                const Complex z = t(p, q).value;
                EXPECT_LE(std::abs(z.imag()), 1e-12 * std::abs(z));
                EXPECT_GT(z.real(), 0.0);
                EXPECT_NEAR(z.real(), testsupport::resistance_real_formula(net, p, q), 1e-10 * z.real());
                for (std::size_t r = 0; r < n; ++r)  // effective resistance is a metric
                    EXPECT_LE(z.real(), t(p, r).value.real() + t(r, q).value.real() + 1e-11 * z.real());
            }
    }
}

TEST(ImpedanceProperties, GaugeInvariance) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = testsupport::random_mixed_network(rng);
        const NetworkSpectrum s = analyze_network(net, AngularFrequency(1.3));
        NetworkSpectrum regauged = s;
        for (std::size_t a = 0; a < s.decomposition.order; ++a) {
            const Complex g = std::polar(1.0, angle(rng));
            for (std::size_t i = 0; i < s.decomposition.order; ++i) regauged.decomposition.u(i, a) *= g;
            regauged.decomposition.lambda[a] *= g * g;
        }
        for (std::size_t p = 0; p < net.node_count(); ++p)
            for (std::size_t q = p + 1; q < net.node_count(); ++q) {
                const ImpedanceResult a = impedance_between(s, p, q), b = impedance_between(regauged, p, q);
                EXPECT_LE(testsupport::rel_diff(a.value, b.value), 1e-12);
            }
    }
}

TEST(ImpedanceProperties, AgreesWithIndependentSolve) {
    std::mt19937_64 rng(24);
    int compared = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const Network net = testsupport::random_mixed_network(rng);
        const AngularFrequency w(std::exp(std::uniform_real_distribution<double>(-1.5, 1.5)(rng)));
        const NetworkSpectrum s = analyze_network(net, w);
        const double smallest = s.decomposition.sigma[1];
        if (smallest < 1e-6 * s.decomposition.sigma.back()) continue;
        ++compared;
        for (std::size_t p = 0; p < net.node_count(); ++p)
            for (std::size_t q = p + 1; q < net.node_count(); ++q) {
                const ImpedanceResult r = impedance_between(s, p, q);
                ASSERT_TRUE(r.finite());
                EXPECT_LE(testsupport::rel_diff(r.value, testsupport::impedance_by_eigen_solve(net, w, p, q)), 1e-8);
            }
    }
    EXPECT_GT(compared, 40);
}
