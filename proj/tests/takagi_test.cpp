#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace impnet;
using testsupport::sqrt2;
using testsupport::sqrt3;

namespace {

void expect_valid(const ComplexMatrix& l, const TakagiDecomposition& d, double tol = 1e-10) {
    const double norm = frobenius_norm(l);
    EXPECT_LE(testsupport::defining_relation_error(l, d), tol * norm);
    EXPECT_LE(testsupport::unitarity_error(d), tol);
    EXPECT_LE(testsupport::diagonalization_error(l, d), tol * norm);
    EXPECT_LE(d.residual, tol * norm);
    const std::vector<double> sv = testsupport::singular_values(l);
    const double smax = sv.back();
    for (std::size_t a = 0; a < d.order; ++a) {
        EXPECT_NEAR(std::abs(d.lambda[a]), sv[a], tol * std::max(sv[a], 1e-3 * smax)) << "mode " << a;
        EXPECT_NEAR(std::norm(d.lambda[a]), d.sigma[a], 1e-12 * std::max(d.sigma[a], 1e-300));
        if (a > 0) {
            EXPECT_LE(d.sigma[a - 1], d.sigma[a]);
        }
    }
}

}  // namespace

TEST(HermitianEigen, Identity) {
    const HermitianEigen e = hermitian_eigendecomposition(ComplexMatrix::identity(2));
    EXPECT_EQ(e.values, (std::vector<double>{1.0, 1.0}));
}

TEST(HermitianEigen, TriangleGram) {
    const ComplexMatrix l = assemble_laplacian(testsupport::triangle(), AngularFrequency(1.0));
    const HermitianEigen e = hermitian_eigendecomposition(adjoint(l) * l);
    EXPECT_NEAR(e.values[0], 0.0, 1e-14);
    EXPECT_NEAR(e.values[1], 3.0 - 2.0 * sqrt2, 1e-14);
    EXPECT_NEAR(e.values[2], 3.0 + 2.0 * sqrt2, 1e-14);
}

TEST(HermitianEigen, RingOfUnitImpedances) {
    const std::size_t n = 7;
    const ComplexMatrix l =
        assemble_laplacian(ring_network(n, std::vector<Element>(n, Resistor{1.0})), AngularFrequency(1.0));
    const HermitianEigen e = hermitian_eigendecomposition(adjoint(l) * l);
    std::vector<double> expected;
    for (std::size_t k = 0; k < n; ++k) {
        const double mu = 2.0 * (1.0 - std::cos(2.0 * k * std::numbers::pi / n));
        expected.push_back(mu * mu);
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(e.values[k], expected[k], 1e-12);
}

TEST(HermitianEigen, AgainstEigenOnRandomMatrices) {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1u, 2u, 3u, 6u, 17u, 40u}) {
        const ComplexMatrix a = testsupport::random_symmetric(n, rng);
        const ComplexMatrix h = adjoint(a) * a;
        ComplexMatrix hh = h;  // shifted to be indefinite, then made exactly Hermitian
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                hh(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i))) - (i == j ? Complex(0.5 * n) : Complex{});
        const HermitianEigen e = hermitian_eigendecomposition(hh);
        Eigen::SelfAdjointEigenSolver<testsupport::EMatrix> ref(testsupport::to_eigen(hh));
        const double scale = frobenius_norm(hh);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(e.values[k], ref.eigenvalues()(k), 1e-12 * scale);
        const testsupport::EMatrix v = testsupport::to_eigen(e.vectors);
        EXPECT_LE((v.adjoint() * v - testsupport::EMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
        const testsupport::EMatrix hv = testsupport::to_eigen(hh) * v;
        for (std::size_t k = 0; k < n; ++k) EXPECT_LE((hv.col(k) - e.values[k] * v.col(k)).norm(), 1e-12 * scale);
    }
}

TEST(HermitianEigen, BudgetExhaustion) {
    std::mt19937_64 rng(6);
    const ComplexMatrix a = testsupport::random_symmetric(12, rng);
    EXPECT_THROW(hermitian_eigendecomposition(adjoint(a) * a, 1), ConvergenceError);
    EXPECT_THROW(hermitian_eigendecomposition(ComplexMatrix(2, 3)), ValidationError);
}

TEST(Takagi, RealResistorChain) {
    const Network chain(3, {{0, 1, Resistor{1.0}}, {1, 2, Resistor{1.0}}});
    const ComplexMatrix l = assemble_laplacian(chain, AngularFrequency(1.0));
    const TakagiDecomposition d = takagi_decompose(l);
    expect_valid(l, d);
    const double expected[3] = {0.0, 1.0, 3.0};
    for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_NEAR(std::abs(d.lambda[a]), expected[a], 1e-14);
        EXPECT_LE(std::abs(d.lambda[a].imag()), 1e-12 * std::max(1.0, std::abs(d.lambda[a])));
        for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(d.u(i, a).imag()), 1e-12);
    }
    // Laplacian is positive semidefinite: nonzero lambda are real positive.
    EXPECT_GT(d.lambda[1].real(), 0.0);
    EXPECT_GT(d.lambda[2].real(), 0.0);
}

TEST(Takagi, TriangleMagnitudes) {
    const ComplexMatrix l = assemble_laplacian(testsupport::triangle(), AngularFrequency(1.0));
    const TakagiDecomposition d = takagi_decompose(l);
    expect_valid(l, d, 1e-12);
    EXPECT_NEAR(std::abs(d.lambda[0]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(d.lambda[1]), sqrt2 - 1.0, 1e-14);
    EXPECT_NEAR(std::abs(d.lambda[2]), sqrt2 + 1.0, 1e-14);
}

TEST(Takagi, TrianglePhasesAfterRegauging) {
    // Printed eigenvectors and phase factors for the triangle; the phases only
    // hold in that gauge, so rotate our vectors onto them first.
    const Complex i(0.0, 1.0);
    const ComplexVector psi2 = {(2.0 - sqrt2 + i * sqrt3), (-sqrt2 - 1.0 - i * sqrt3), Complex(2.0 * sqrt2 - 1.0)};
    const ComplexVector psi3 = {(2.0 + sqrt2 + i * sqrt3), (sqrt2 - 1.0 - i * sqrt3), Complex(-2.0 * sqrt2 - 1.0)};
    const Complex phase2 = (3.0 * sqrt2 - 2.0 + i * sqrt3 * (2.0 * sqrt2 + 1.0)) / 7.0;
    const Complex phase3 = (3.0 * sqrt2 + 2.0 + i * sqrt3 * (2.0 * sqrt2 - 1.0)) / 7.0;

    const ComplexMatrix l = assemble_laplacian(testsupport::triangle(), AngularFrequency(1.0));
    const TakagiDecomposition d = takagi_decompose(l);
    const std::pair<ComplexVector, Complex> printed[2] = {{psi2, phase2}, {psi3, phase3}};
    for (std::size_t k = 0; k < 2; ++k) {
        ComplexVector target = printed[k].first;
        const double nrm = norm2(target);
        for (auto& x : target) x /= nrm;
        const ComplexVector u = d.vector(k + 1);
        const Complex overlap = dot(u, target);  // target = g u with |g| = 1
        ASSERT_NEAR(std::abs(overlap), 1.0, 1e-12);
        const Complex g = overlap / std::abs(overlap);
        const Complex lambda_in_gauge = g * g * d.lambda[k + 1];
        EXPECT_LT(std::abs(lambda_in_gauge / std::abs(lambda_in_gauge) - printed[k].second), 1e-12);
    }
}

TEST(Takagi, RandomSymmetricMatrices) {
    std::mt19937_64 rng(8);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 32u}) {
        const ComplexMatrix l = testsupport::random_symmetric(n, rng);
        expect_valid(l, takagi_decompose(l));
    }
}

TEST(Takagi, DegenerateCirculants) {
    std::mt19937_64 rng(9);
    for (std::size_t n : {2u, 3u, 4u, 5u, 8u, 12u, 16u}) {
        const ComplexMatrix l = testsupport::random_symmetric_circulant(n, rng);
        expect_valid(l, takagi_decompose(l));
    }
}

TEST(Takagi, HighMultiplicityClusters) {
    // Scaled identity (one cluster of size n), a complex symmetric unitary
    // (also all sigma = 1) and a ring Laplacian with paired sigma.
    std::mt19937_64 rng(10);
    for (std::size_t n : {2u, 3u, 6u}) {
        ComplexMatrix id = ComplexMatrix::identity(n);
        for (std::size_t k = 0; k < n; ++k) id(k, k) = Complex(0.0, 2.0);
        expect_valid(id, takagi_decompose(id));

        const ComplexMatrix s = testsupport::random_symmetric(n, rng);
        const TakagiDecomposition ds = takagi_decompose(s);
        const ComplexMatrix unitary = transpose(ds.u) * ds.u;  // U^T U is symmetric and unitary
        expect_valid(unitary, takagi_decompose(unitary));
    }
    const ComplexMatrix ring =
        assemble_laplacian(ring_network(6, std::vector<Element>(6, FixedImpedance{{1.0, 2.0}})), AngularFrequency(1.0));
    expect_valid(ring, takagi_decompose(ring));
}

TEST(Takagi, ZeroMatrixAndRankDeficient) {
    const ComplexMatrix zero(4, 4);
    const TakagiDecomposition d = takagi_decompose(zero);
    EXPECT_LE(testsupport::unitarity_error(d), 1e-14);
    for (const auto& x : d.lambda) EXPECT_EQ(x, Complex{});

    std::mt19937_64 rng(11);
    ComplexVector v(5);
    for (auto& x : v) x = Complex(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
    ComplexMatrix rank1(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) rank1(i, j) = v[i] * v[j];
    expect_valid(rank1, takagi_decompose(rank1));
}

TEST(Takagi, RealInputStaysReal) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = testsupport::random_resistor_network(rng);
        const ComplexMatrix l = assemble_laplacian(net, AngularFrequency(1.0));
        const TakagiDecomposition d = takagi_decompose(l);
        for (std::size_t a = 0; a < d.order; ++a) {
            EXPECT_LE(std::abs(d.lambda[a].imag()), 1e-12 * frobenius_norm(l));
            for (std::size_t i = 0; i < d.order; ++i) EXPECT_LE(std::abs(d.u(i, a).imag()), 1e-12);
        }
    }
}

TEST(Takagi, CanonicalGauge) {
    std::mt19937_64 rng(13);
    const ComplexMatrix l = testsupport::random_symmetric(9, rng);
    const TakagiDecomposition d = takagi_decompose(l);
    for (std::size_t a = 0; a < d.order; ++a) {
        std::size_t top = 0;
        for (std::size_t i = 1; i < d.order; ++i)
            if (std::abs(d.u(i, a)) > std::abs(d.u(top, a)) + 1e-12) top = i;
        EXPECT_GT(d.u(top, a).real(), 0.0);
        EXPECT_LE(std::abs(d.u(top, a).imag()), 1e-15);
    }
    // Deterministic: same input, same output bits.
    const TakagiDecomposition again = takagi_decompose(l);
    EXPECT_EQ(again.u, d.u);
    EXPECT_EQ(again.lambda, d.lambda);
}

TEST(Takagi, RejectsNonSymmetric) {
    ComplexMatrix l(2, 2);
    l(0, 1) = 1.0;
    EXPECT_THROW(takagi_decompose(l), NotSymmetricError);
    EXPECT_THROW(takagi_decompose(ComplexMatrix(2, 3)), NotSymmetricError);
}

TEST(ZeroModes, Triangle) {
    const ComplexMatrix l = assemble_laplacian(testsupport::triangle(), AngularFrequency(1.0));
    const ZeroModeClassification z = classify_zero_modes(takagi_decompose(l));
    EXPECT_EQ(z.zero_indices.size(), 1u);
    EXPECT_EQ(z.nontrivial_zero_count, 0u);
    EXPECT_GE(z.trivial_overlap, 1.0 - 1e-8);
}

TEST(ZeroModes, ParallelLcAtResonance) {
    const Network lc = testsupport::lc_parallel(1.0, 1.0);
    const NetworkSpectrum s = analyze_network(lc, AngularFrequency(1.0));
    EXPECT_EQ(s.zero_modes.zero_indices.size(), 2u);
    EXPECT_EQ(s.zero_modes.nontrivial_zero_count, 1u);
    EXPECT_GE(s.zero_modes.trivial_overlap, 1.0 - 1e-8);
}

TEST(ZeroModes, SingleResistor) {
    const ComplexMatrix l = assemble_laplacian(Network(2, {{0, 1, Resistor{3.0}}}), AngularFrequency(1.0));
    const ZeroModeClassification z = classify_zero_modes(takagi_decompose(l));
    EXPECT_EQ(z.zero_indices.size(), 1u);
    EXPECT_EQ(z.nontrivial_zero_count, 0u);
}

TEST(ZeroModes, NonLaplacianRejected) {
    ComplexMatrix l = ComplexMatrix::identity(3);
    EXPECT_THROW(classify_zero_modes(takagi_decompose(l)), NoTrivialZeroError);
    // Null vector not constant.
    ComplexMatrix m(2, 2);
    m(0, 0) = 1.0;
    EXPECT_THROW(classify_zero_modes(takagi_decompose(m)), NoTrivialZeroError);
}

TEST(ZeroModes, AlignmentPutsConstantVectorFirst) {
    // 3x3 LC grid at omega = 1 has a doubly degenerate resonance: three
    // zero modes, from which the solver returns an arbitrary basis.
    const Network grid = grid_network(3, 3, 1.0, 1.0);
    const NetworkSpectrum s = analyze_network(grid, AngularFrequency(1.0));
    EXPECT_EQ(s.zero_modes.nontrivial_zero_count, 2u);
    EXPECT_GE(s.zero_modes.trivial_overlap, 1.0 - 1e-10);
}
