#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "unisplit/linalg.hpp"

using namespace unisplit;

TEST(BasicAlgebra, CommutatorWithIdentityVanishes) {
    std::mt19937_64 g(11);
    const ComplexMatrix m = oracle::random_complex(g, 6);
    const ComplexMatrix id = ComplexMatrix::Identity(6, 6);
    EXPECT_EQ(commutator(id, m).norm(), 0.0);
    EXPECT_EQ(commutator(m, m).norm(), 0.0);
}

TEST(BasicAlgebra, AdjointIsInvolution) {
    std::mt19937_64 g(12);
    const ComplexMatrix m = oracle::random_complex(g, 5);
    EXPECT_EQ((adjoint(adjoint(m)) - m).norm(), 0.0);
    EXPECT_EQ((adjoint(m) - conjugate(transpose(m))).norm(), 0.0);
}

TEST(BasicAlgebra, SolveRecoversVector) {
    std::mt19937_64 g(13);
    ComplexMatrix m = oracle::random_complex(g, 10);
    m += 10.0 * ComplexMatrix::Identity(10, 10);  // well conditioned
    const ComplexVector v = oracle::random_vector(g, 10);
    const ComplexVector b = m * v;
    const ComplexVector x = solve(m, b);
    EXPECT_LE((m * x - b).norm() / b.norm(), 1e-12);
    EXPECT_LE((x - v).norm() / v.norm(), 1e-12);
}

TEST(BasicAlgebra, SingularSolveReportsCondition) {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    try {
        solve(m, ComplexVector(ComplexVector::Ones(3)));
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.condition(), 1e14);
    }
}

TEST(BasicAlgebra, DimensionMismatchIsUsageError) {
    const ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    const ComplexMatrix b = ComplexMatrix::Zero(4, 4);
    EXPECT_THROW(commutator(a, b), UsageError);
    EXPECT_THROW(multiply(a, b), UsageError);
    EXPECT_THROW(add(a, b), UsageError);
    EXPECT_THROW(solve(a, ComplexVector(ComplexVector::Ones(4))), UsageError);
}

TEST(Expm, ZeroGivesIdentity) {
    const ComplexMatrix z = ComplexMatrix::Zero(4, 4);
    EXPECT_EQ((expm(z) - ComplexMatrix::Identity(4, 4)).norm(), 0.0);
}

TEST(Expm, DiagonalPhases) {
    ComplexMatrix d = ComplexMatrix::Zero(4, 4);
    const double th[] = {0.3, -1.7, 2.9, 7.5};
    for (int i = 0; i < 4; ++i) d(i, i) = cplx(0.0, th[i]);
    const ComplexMatrix e = expm(d);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(std::abs(e(i, i)), 1.0, 1e-14);
        EXPECT_LE(std::abs(e(i, i) - std::exp(cplx(0.0, th[i]))), 1e-13);
    }
}

TEST(Expm, MatchesTaylorSeriesForSmallNorm) {
    std::mt19937_64 g(21);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = oracle::random_complex(g, 4);
        m *= (0.05 + 0.95 * trial / 19.0) / m.norm();
        const ComplexMatrix ref = oracle::taylor_expm(m, 30);
        EXPECT_LE((expm(m) - ref).norm() / ref.norm(), 1e-12) << "trial " << trial;
    }
}

TEST(Expm, RelativeAccuracyUpToNormTen) {
    std::mt19937_64 g(22);
    for (double target : {0.5, 2.0, 5.0, 10.0}) {
        const ComplexMatrix base = oracle::random_complex(g, 8);
        const ComplexMatrix m = base * (target / base.norm());
        // independent oracle: Taylor on m / 2^8, squared back
        ComplexMatrix ref = oracle::taylor_expm(m / 256.0, 30);
        for (int k = 0; k < 8; ++k) ref = ref * ref;
        EXPECT_LE((expm(m) - ref).norm() / ref.norm(), 1e-12) << "norm " << target;
    }
}

TEST(Expm, InverseProperty) {
    std::mt19937_64 g(23);
    for (int trial = 0; trial < 10; ++trial) {
        ComplexMatrix m = oracle::random_complex(g, 10);
        m *= 5.0 * (trial + 1) / 10.0 / m.norm();
        const ComplexMatrix p = expm(m) * expm(-m);
        EXPECT_LE((p - ComplexMatrix::Identity(10, 10)).norm(), 1e-11);
    }
}

TEST(Expm, NonSquareIsUsageError) {
    EXPECT_THROW(expm(ComplexMatrix::Zero(2, 3)), UsageError);
}

TEST(EigGeneral, Diagonal) {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    d(2, 2) = 3.0;
    const auto ev = eig_general(d);
    EXPECT_LE(oracle::multiset_distance(ev, {1.0, 2.0, 3.0}), 1e-14);
}

TEST(EigGeneral, PlanarRotation) {
    const double th = 0.7;
    ComplexMatrix r(2, 2);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const auto ev = eig_general(r);
    EXPECT_LE(oracle::multiset_distance(ev, {std::exp(cplx(0, th)), std::exp(cplx(0, -th))}), 1e-14);
}

TEST(EigGeneral, ConjugatedDiagonal) {
    std::mt19937_64 g(31);
    for (int n : {2, 5, 10, 30, 64}) {
        const ComplexMatrix p = oracle::random_complex(g, n) + 3.0 * ComplexMatrix::Identity(n, n);
        std::vector<cplx> lam;
        ComplexMatrix d = ComplexMatrix::Zero(n, n);
        std::normal_distribution<double> nd;
        for (int i = 0; i < n; ++i) {
            lam.emplace_back(nd(g), nd(g));
            d(i, i) = lam.back();
        }
        const ComplexMatrix m = p * d * p.inverse();
        const auto ev = eig_general(m);
        ASSERT_EQ(ev.size(), static_cast<std::size_t>(n));
        EXPECT_LE(oracle::set_distance(ev, lam), 1e-10 * m.norm()) << "n=" << n;
        EXPECT_LE(oracle::set_distance(lam, ev), 1e-10 * m.norm()) << "n=" << n;
    }
}

TEST(EigGeneral, ReturnsMultiplicities) {
    ComplexMatrix d = ComplexMatrix::Zero(4, 4);
    d(0, 0) = d(1, 1) = 2.0;
    d(2, 2) = d(3, 3) = -1.0;
    std::mt19937_64 g(32);
    const ComplexMatrix q = oracle::random_complex(g, 4).householderQr().householderQ();
    const auto ev = eig_general(q * d * q.adjoint());
    EXPECT_LE(oracle::multiset_distance(ev, {2.0, 2.0, -1.0, -1.0}), 1e-12);
}

TEST(EigGeneral, UnitaryFlowEigenvaluesOnCircle) {
    std::mt19937_64 g(33);
    const ComplexMatrix s = oracle::random_symmetric(g, 10).cast<cplx>();
    for (double t : {0.1, 1.0, 3.0}) {
        const auto ev = eig_general(expm(cplx(0, t) * s));
        for (cplx w : ev) EXPECT_NEAR(std::abs(w), 1.0, 1e-11);
        const auto se = eig_symmetric(s);
        std::vector<cplx> exact;
        for (int j = 0; j < 10; ++j) exact.push_back(std::exp(cplx(0, t * se.values(j))));
        EXPECT_LE(oracle::multiset_distance(ev, exact), 1e-9);
    }
}

TEST(EigGeneral, NonConvergenceIsReported) {
    std::mt19937_64 g(34);
    LinalgOptions opt;
    opt.qr_iterations_per_eigenvalue = 0;
    EXPECT_THROW(eig_general(oracle::random_complex(g, 6), opt), NumericalError);
}

TEST(EigSymmetric, IdentityAndSorting) {
    const auto id = eig_symmetric(ComplexMatrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(id.values(i), 1.0);
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    const auto e = eig_symmetric(d);
    EXPECT_DOUBLE_EQ(e.values(0), 1.0);
    EXPECT_DOUBLE_EQ(e.values(1), 2.0);
    EXPECT_DOUBLE_EQ(e.values(2), 3.0);
    EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors(0, 2)), 1.0, 1e-15);
}

TEST(EigSymmetric, Reconstruction256) {
    std::mt19937_64 g(41);
    const RealMatrix s = oracle::random_symmetric(g, 256);
    const auto e = eig_symmetric(s.cast<cplx>());
    const RealMatrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((rec - s).norm(), 1e-10);
    EXPECT_LE((e.vectors.transpose() * e.vectors - RealMatrix::Identity(256, 256)).cwiseAbs().maxCoeff(), 1e-12);
    const RealMatrix diag = e.vectors.transpose() * s * e.vectors;
    const RealMatrix off = diag - RealMatrix(diag.diagonal().asDiagonal());
    EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-10 * s.norm());
    for (int i = 1; i < 256; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
}

TEST(EigSymmetric, OrthonormalityTenByTen) {
    std::mt19937_64 g(42);
    const RealMatrix s = oracle::random_symmetric(g, 10);
    const auto e = eig_symmetric(s.cast<cplx>());
    EXPECT_LE((e.vectors.transpose() * e.vectors - RealMatrix::Identity(10, 10)).norm(), 1e-12);
}

TEST(EigSymmetric, RejectsAsymmetricInput) {
    ComplexMatrix m = ComplexMatrix::Identity(3, 3);
    m(0, 1) = 1e-6;
    EXPECT_THROW(eig_symmetric(m), UsageError);
    ComplexMatrix c = ComplexMatrix::Identity(3, 3);
    c(0, 0) = cplx(1.0, 1e-6);
    EXPECT_THROW(eig_symmetric(c), UsageError);
}
