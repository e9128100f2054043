#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "unisplit/catalog.hpp"
#include "unisplit/fft.hpp"
#include "unisplit/propagator.hpp"
#include "unisplit/schrodinger.hpp"

using namespace unisplit;

namespace {

ComplexVector mode(const SpectralGrid& g, int m) {
    const double k = g.wavenumbers()(m);
    ComplexVector u(g.size());
    for (int j = 0; j < g.size(); ++j) u(j) = std::exp(cplx(0, k * g.node(j)));
    return u;
}

}  // namespace

TEST(Fft, MatchesNaiveDft) {
    std::mt19937_64 g(1);
    for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
        const ComplexVector x = oracle::random_vector(g, static_cast<int>(n));
        Fft f(n);
        ComplexVector y = x;
        f.forward(y);
        EXPECT_LE((y - oracle::naive_dft(x)).norm() / x.norm(), 1e-13) << n;
        ComplexVector z = x;
        f.inverse(z);
        EXPECT_LE((z - oracle::naive_dft(x, true)).norm() / x.norm(), 1e-13) << n;
    }
}

TEST(Fft, UnitaryRoundTripAndCounter) {
    std::mt19937_64 g(2);
    const ComplexVector x = oracle::random_vector(g, 128);
    Fft f(128);
    ComplexVector y = x;
    f.forward(y);
    EXPECT_NEAR(y.norm(), x.norm(), 1e-12 * x.norm());
    f.inverse(y);
    EXPECT_LE((y - x).norm() / x.norm(), 1e-12);
    EXPECT_EQ(f.calls(), 2u);
    f.reset_calls();
    EXPECT_EQ(f.calls(), 0u);
}

TEST(Fft, DeltaAndPureMode) {
    const SpectralGrid grid(32);
    Fft f(32);
    ComplexVector d = ComplexVector::Zero(32);
    d(0) = 1.0;
    f.forward(d);
    for (int i = 0; i < 32; ++i) EXPECT_NEAR(std::abs(d(i)), 1.0 / std::sqrt(32.0), 1e-15);
    for (int m : {0, 3, 17, 31}) {
        ComplexVector u = mode(grid, m);
        f.forward(u);
        for (int i = 0; i < 32; ++i) {
            if (i == m) EXPECT_NEAR(std::abs(u(i)), std::sqrt(32.0), 1e-12);
            else EXPECT_LE(std::abs(u(i)), 1e-12) << m << " " << i;
        }
    }
}

TEST(Fft, RejectsBadLengths) {
    EXPECT_FALSE(is_power_of_two(12));
    EXPECT_TRUE(is_power_of_two(1));
    EXPECT_THROW(Fft(12), UsageError);
    Fft f(8);
    ComplexVector v = ComplexVector::Zero(4);
    EXPECT_THROW(f.forward(v), UsageError);
}

TEST(SpectralGrid, NodesAndWavenumbers) {
    const SpectralGrid g(8, -8.0, 8.0);
    EXPECT_DOUBLE_EQ(g.dx(), 2.0);
    EXPECT_DOUBLE_EQ(g.node(0), -8.0);
    EXPECT_DOUBLE_EQ(g.node(7), 6.0);
    const RealVector k = g.wavenumbers();
    const double k0 = 2.0 * std::numbers::pi / 16.0;
    const int m[] = {0, 1, 2, 3, -4, -3, -2, -1};
    for (int i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(k(i), k0 * m[i]);
    EXPECT_THROW(SpectralGrid(100), UsageError);
}

TEST(PtPotential, Values) {
    const SpectralGrid g(256);
    const RealVector v = pt_potential(g);
    EXPECT_DOUBLE_EQ(v(128), -5.0);  // x = 0
    for (int j = 1; j < 128; ++j) EXPECT_DOUBLE_EQ(v(128 + j), v(128 - j));
    EXPECT_NEAR(v(0), -5.0 / std::pow(std::cosh(8.0), 2), 1e-20);
    EXPECT_NEAR(v(0), -2.2507029878186e-6, 1e-18);
    EXPECT_THROW(pt_potential(g, 0.0), UsageError);
    EXPECT_THROW(pt_potential(g, 1.0, -1.0), UsageError);
}

TEST(InitialGaussian, NormalizedAndSymmetric) {
    for (int n : {32, 256, 1024}) {
        const SpectralGrid g(n);
        const auto u = initial_gaussian(g);
        EXPECT_NEAR(weighted_norm(g, u.values), 1.0, 1e-14);
        for (int j = 1; j < n / 2; ++j) EXPECT_NEAR(std::abs(u.values(n / 2 + j) - u.values(n / 2 - j)), 0.0, 1e-15);
    }
    const SpectralGrid g(1024);
    EXPECT_NEAR(initial_gaussian(g).values(512).real(), std::pow(std::numbers::pi, -0.25), 1e-12);
}

TEST(SplitStep, FreeParticlePhase) {
    const SpectralGrid g(64);
    const RealVector v0 = RealVector::Zero(64);
    SplittingScheme a_only{"A", Kind::ABA, 1, false, {{Op::A, cplx(1.0)}}, {}};
    for (int m : {1, 5, 40}) {
        const ComplexVector u = mode(g, m);
        const double k = g.wavenumbers()(m);
        const auto out = split_step(a_only, g, v0, {g, u}, 0.3);
        EXPECT_LE((out.values - std::exp(cplx(0, -0.3 * k * k / 2)) * u).norm() / u.norm(), 1e-12) << m;
    }
}

TEST(SplitStep, RealSchemePreservesNorm) {
    const SpectralGrid g(256);
    const RealVector v = pt_potential(g);
    Wavefunction u = initial_gaussian(g);
    for (int i = 0; i < 20; ++i) {
        const double before = weighted_norm(g, u.values);
        u = split_step(find_scheme("Strang"), g, v, u, 0.05);
        EXPECT_NEAR(weighted_norm(g, u.values), before, 1e-12);
    }
}

TEST(SplitStep, MatchesDenseStepMatrixAtN64) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto d = build_dense_hamiltonian(g, v);
    const auto u0 = initial_gaussian(g);
    for (const auto& s : catalog()) {
        const ComplexVector want = step_matrix(s, d.A, d.B, 0.11) * u0.values;
        const auto got = split_step(s, g, v, u0, 0.11);
        EXPECT_LE((got.values - want).norm() / want.norm(), 1e-10) << s.name;
    }
}

TEST(SplitStep, RejectsNonAlternatingScheme) {
    const SpectralGrid g(16);
    SplittingScheme bad{"bad", Kind::ABA, 1, false, {{Op::A, cplx(0.5)}, {Op::A, cplx(0.5)}, {Op::B, cplx(1.0)}}, {}};
    EXPECT_THROW(split_step(bad, g, pt_potential(g), initial_gaussian(g), 0.1), UsageError);
}

TEST(SplitStep, OverflowAborts) {
    const SpectralGrid g(64);
    // an imaginary B coefficient amplifies by e^{h Im(c) |V|}
    SplittingScheme grow{"grow", Kind::BAB, 1, false, {{Op::B, cplx(1.0, -1.0)}}, {}};
    SpectralStepper st(g, pt_potential(g));
    ComplexVector u = initial_gaussian(g).values;
    const auto plan = st.plan(grow, 1.0);
    try {
        st.propagate(plan, u, 100);
        FAIL() << "expected RunAborted";
    } catch (const RunAborted& e) {
        // 5 per step in the exponent, bound 1e12 is passed in step 6
        EXPECT_EQ(e.step(), 6u);
    }
}

TEST(FftCount, TwoPerAFactor) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    for (const auto& s : catalog()) {
        SpectralStepper st(g, v);
        ComplexVector u = initial_gaussian(g).values;
        st.step(s, u, 0.1);
        EXPECT_EQ(st.fft_count(), 2 * s.count(Op::A)) << s.name;
    }
}

TEST(FftCount, MergedAbaSteps) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    for (const char* name : {"Strang", "NA11s6", "TripleJump4", "NB11s6"}) {
        const auto& s = find_scheme(name);
        SpectralStepper st(g, v);
        ComplexVector u = initial_gaussian(g).values;
        const std::size_t n = 7;
        st.propagate(st.plan(s, 0.1), u, n);
        const std::size_t na = s.count(Op::A);
        const std::size_t want = s.kind == Kind::ABA ? 2 * (n * na - (n - 1)) : 2 * n * na;
        EXPECT_EQ(st.fft_count(), want) << name;

        // merged and unmerged runs agree
        SpectralStepper st2(g, v);
        ComplexVector w = initial_gaussian(g).values;
        st2.propagate(st2.plan(s, 0.1), w, n, false);
        EXPECT_LE((u - w).norm() / w.norm(), 1e-12) << name;
        EXPECT_EQ(st2.fft_count(), 2 * n * na);
    }
}

TEST(Observables, PureModeEnergy) {
    const SpectralGrid g(64);
    const RealVector v0 = RealVector::Zero(64);
    for (int m : {0, 3, 60}) {
        const double k = g.wavenumbers()(m);
        const auto o = observables(g, v0, mode(g, m));
        EXPECT_NEAR(o.energy, -0.5 * k * k * o.mass, 1e-11 * std::max(1.0, std::abs(o.energy)));
        EXPECT_NEAR(o.mass, 16.0, 1e-12);
    }
}

TEST(Observables, MatchesDenseQuadraticForm) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto d = build_dense_hamiltonian(g, v);
    std::mt19937_64 r(5);
    for (int k = 0; k < 3; ++k) {
        const ComplexVector u = k == 0 ? initial_gaussian(g).values : oracle::random_vector(r, 64);
        const auto o = observables(g, v, u);
        const cplx e = g.dx() * u.dot(d.H * u);
        EXPECT_NEAR(o.energy, e.real(), 1e-10 * std::max(1.0, std::abs(e)));
        EXPECT_LE(std::abs(o.energy_imag), 1e-12 * std::abs(o.energy));
    }
}

TEST(RknResidual, ConstantPotentialVanishes) {
    const SpectralGrid g(64);
    const RealVector v = RealVector::Constant(64, -2.5);
    EXPECT_LE(rkn_residual(g, v, initial_gaussian(g).values), 1e-12);
}

TEST(RknResidual, FineAndCoarseGrids) {
    const SpectralGrid fine(256), coarse(32);
    const double rf = rkn_residual(fine, pt_potential(fine), initial_gaussian(fine).values);
    const double rc = rkn_residual(coarse, pt_potential(coarse), initial_gaussian(coarse).values);
    EXPECT_LE(rf, 1e-10);
    EXPECT_GE(rc, 1e-4);
}

TEST(RknResidual, MatchesDenseCommutator) {
    const SpectralGrid g(32);
    const RealVector v = pt_potential(g);
    const auto d = build_dense_hamiltonian(g, v);
    const ComplexVector u0 = initial_gaussian(g).values;
    const ComplexMatrix c = commutator(d.B, commutator(d.B, commutator(d.B, d.A)));
    EXPECT_NEAR(rkn_residual(g, v, u0), std::sqrt(g.dx()) * (c * u0).norm(), 1e-9 * (c * u0).norm());
}

TEST(DenseHamiltonian, SymmetricAndMatchesKinetic) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto d = build_dense_hamiltonian(g, v);
    EXPECT_LE((d.A - d.A.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((d.H - d.H.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(d.A.imag().cwiseAbs().maxCoeff(), 0.0);
    std::mt19937_64 r(6);
    const ComplexVector u = oracle::random_vector(r, 64);
    EXPECT_LE((d.A * u - apply_kinetic(g, u)).norm() / u.norm(), 1e-12);
    EXPECT_THROW(build_dense_hamiltonian(SpectralGrid(2048), pt_potential(SpectralGrid(2048))), UsageError);
}

TEST(DenseReference, ConservesAndStartsAtInitialState) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto d = build_dense_hamiltonian(g, v);
    const auto u0 = initial_gaussian(g);
    EXPECT_LE((reference_solution(g, d.H, u0, 0.0).values - u0.values).norm(), 1e-13);
    const auto o0 = observables(g, v, u0.values);
    const DenseReference ref(d.H);
    for (double t : {0.5, 10.0, 100.0}) {
        const ComplexVector ut = ref.evaluate(u0.values, t);
        const auto o = observables(g, v, ut);
        EXPECT_NEAR(o.mass, o0.mass, 1e-11);
        EXPECT_NEAR(o.energy, o0.energy, 1e-11 * std::max(1.0, std::abs(o0.energy)));
        EXPECT_LE((ut - exact_propagator(d.H, t) * u0.values).norm(), 1e-10);
    }
}

TEST(LocalErrors, StrangOrder) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto d = build_dense_hamiltonian(g, v);
    const DenseReference ref(d.H);
    const std::vector<double> h{0.002, 0.004, 0.008, 0.016};
    const auto e = local_errors(find_scheme("Strang"), g, v, ref, initial_gaussian(g).values, h);
    EXPECT_NEAR(oracle::slope(h, e), 3.0, 0.2);
}

TEST(ConservationRunSpectral, RealSchemeMassConserved) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto r = spectral_conservation_run(find_scheme("TripleJump4"), g, v, initial_gaussian(g).values, 0.05, 400, 50);
    EXPECT_FALSE(r.aborted_at);
    EXPECT_LE(r.series.sup("mass_error"), 1e-12);
    EXPECT_EQ(r.series.size(), 9u);
    EXPECT_DOUBLE_EQ(r.series.x().back(), 20.0);
    EXPECT_EQ(r.series.column("fft_count").back(), static_cast<double>(r.fft_count));
}

TEST(Efficiency, PointCountsFfts) {
    const SpectralGrid g(64);
    const RealVector v = pt_potential(g);
    const auto& s = find_scheme("NB5s4");
    const auto p = efficiency_point(s, g, v, initial_gaussian(g).values, 0.1, 1.0);
    EXPECT_EQ(p.fft_count, 10u * 2u * s.count(Op::A));
    EXPECT_FALSE(p.aborted);
    EXPECT_GT(p.max_energy_error, 0.0);
}
