#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "error.hpp"
#include "fft.hpp"
#include "linalg.hpp"
#include "scheme.hpp"

namespace unisplit {

// Periodic grid x_j = x_min + j dx, j = 0..N-1, with wavenumbers in DFT order.
class SpectralGrid {
public:
    explicit SpectralGrid(int n = 256, double x_min = -8.0, double x_max = 8.0)
        : n_(n), x_min_(x_min), x_max_(x_max) {
        if (n < 2 || !is_power_of_two(static_cast<std::size_t>(n)))
            throw UsageError("SpectralGrid: N must be a power of two, got " + std::to_string(n));
        if (!(x_max > x_min)) throw UsageError("SpectralGrid: x_max must exceed x_min");
    }

    int size() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double length() const { return x_max_ - x_min_; }
    double dx() const { return length() / n_; }
    double node(int j) const { return x_min_ + j * dx(); }

    RealVector nodes() const {
        RealVector x(n_);
        for (int j = 0; j < n_; ++j) x(j) = node(j);
        return x;
    }

    // k_m = 2 pi m / L; index i holds m = i for i < N/2 and m = i - N otherwise
    RealVector wavenumbers() const {
        RealVector k(n_);
        for (int i = 0; i < n_; ++i) {
            const int m = i < n_ / 2 ? i : i - n_;
            k(i) = 2.0 * std::numbers::pi * m / length();
        }
        return k;
    }

private:
    int n_;
    double x_min_, x_max_;
};

struct Wavefunction {
    SpectralGrid grid;
    ComplexVector values;
};

inline double weighted_norm(const SpectralGrid& g, const ComplexVector& u) {
    return std::sqrt(g.dx() * u.squaredNorm());
}

// V(x) = -(alpha^2 / 2) lam_prod / cosh^2(alpha x), lam_prod = lambda (lambda - 1)
inline RealVector pt_potential(const SpectralGrid& g, double alpha = 1.0, double lam_prod = 10.0) {
    if (!(alpha > 0.0)) throw UsageError("pt_potential: alpha must be positive");
    if (!(lam_prod > 0.0)) throw UsageError("pt_potential: lambda(lambda-1) must be positive");
    RealVector v(g.size());
    for (int j = 0; j < g.size(); ++j) {
        const double c = std::cosh(alpha * g.node(j));
        v(j) = -0.5 * alpha * alpha * lam_prod / (c * c);
    }
    return v;
}

inline Wavefunction initial_gaussian(const SpectralGrid& g) {
    ComplexVector u(g.size());
    for (int j = 0; j < g.size(); ++j) {
        const double x = g.node(j);
        u(j) = std::exp(-0.5 * x * x);
    }
    u /= weighted_norm(g, u);
    return {g, u};
}

// Multipliers for one scheme at one step size, ready to apply repeatedly.
struct SplitStepPlan {
    struct Stage {
        Op op;
        ComplexVector mult;  // Fourier-space for A, physical-space for B
    };
    std::vector<Stage> stages;
    std::optional<ComplexVector> boundary_a;  // merged last+first A when both ends are A
    std::size_t a_factors = 0;
};

class SpectralStepper {
public:
    SpectralStepper(const SpectralGrid& g, RealVector v, std::optional<double> clip = std::nullopt)
        : grid_(g), v_(std::move(v)), fft_(static_cast<std::size_t>(g.size())) {
        if (v_.size() != g.size()) throw UsageError("SpectralStepper: potential length differs from grid");
        if (clip) v_ = v_.cwiseMax(-*clip).cwiseMin(*clip);
        const RealVector k = g.wavenumbers();
        half_k2_ = 0.5 * k.array().square();
    }

    const SpectralGrid& grid() const { return grid_; }
    const RealVector& potential() const { return v_; }
    std::size_t fft_count() const { return fft_.calls(); }
    void reset_fft_count() { fft_.reset_calls(); }
    double overflow_bound = 1e12;

    ComplexVector a_multiplier(cplx c, double h) const {
        // e^{ihcA} with A = -k^2/2 in Fourier space
        ComplexVector m(grid_.size());
        for (int i = 0; i < grid_.size(); ++i) m(i) = std::exp(-I_unit * h * c * half_k2_(i));
        return m;
    }
    ComplexVector b_multiplier(cplx c, double h) const {
        // e^{ihcB} with B = -V
        ComplexVector m(grid_.size());
        for (int i = 0; i < grid_.size(); ++i) m(i) = std::exp(-I_unit * h * c * v_(i));
        return m;
    }

    SplitStepPlan plan(const SplittingScheme& s, double h) const {
        if (!alternates(s)) throw UsageError("split_step: scheme factors must alternate A and B");
        SplitStepPlan p;
        for (const auto& f : s.factors) {
            p.stages.push_back({f.op, f.op == Op::A ? a_multiplier(f.coef, h) : b_multiplier(f.coef, h)});
            if (f.op == Op::A) ++p.a_factors;
        }
        if (s.factors.size() > 1 && s.factors.front().op == Op::A && s.factors.back().op == Op::A)
            p.boundary_a = a_multiplier(s.factors.front().coef + s.factors.back().coef, h);
        return p;
    }

    void apply_a(const ComplexVector& mult, ComplexVector& u) {
        fft_.forward(u);
        u.array() *= mult.array();
        fft_.inverse(u);
    }

    // One step; 2 FFTs per A-factor.
    void step(const SplitStepPlan& p, ComplexVector& u, std::size_t step_index = 0) {
        for (const auto& st : p.stages) {
            if (st.op == Op::A) apply_a(st.mult, u);
            else u.array() *= st.mult.array();
        }
        check(u, step_index);
    }

    // n consecutive steps. With merge_boundary, the closing A of one step and the
    // opening A of the next are applied as a single A-factor.
    void propagate(const SplitStepPlan& p, ComplexVector& u, std::size_t n, bool merge_boundary = true,
                   std::size_t first_index = 1) {
        if (n == 0) return;
        if (!merge_boundary || !p.boundary_a || p.stages.size() < 2) {
            for (std::size_t k = 0; k < n; ++k) step(p, u, first_index + k);
            return;
        }
        const std::size_t last = p.stages.size() - 1;
        auto inner = [&](std::size_t from) {
            for (std::size_t i = from; i < last; ++i) {
                const auto& st = p.stages[i];
                if (st.op == Op::A) apply_a(st.mult, u);
                else u.array() *= st.mult.array();
            }
        };
        inner(0);
        for (std::size_t k = 1; k < n; ++k) {
            apply_a(*p.boundary_a, u);
            inner(1);
            check(u, first_index + k);
        }
        apply_a(p.stages[last].mult, u);
        check(u, first_index + n - 1);
    }

    void step(const SplittingScheme& s, ComplexVector& u, double h) { step(plan(s, h), u); }

private:
    void check(const ComplexVector& u, std::size_t step_index) const {
        const double m = u.cwiseAbs().maxCoeff();
        if (!std::isfinite(m) || m > overflow_bound)
            throw RunAborted("split_step: |u| exceeded the overflow bound", step_index);
    }

    SpectralGrid grid_;
    RealVector v_;
    RealVector half_k2_;
    Fft fft_;
};

inline Wavefunction split_step(const SplittingScheme& s, const SpectralGrid& g, const RealVector& v,
                               const Wavefunction& u, double h) {
    if (u.values.size() != g.size()) throw UsageError("split_step: state length differs from grid");
    SpectralStepper st(g, v);
    Wavefunction out{g, u.values};
    st.step(s, out.values, h);
    return out;
}

// A u with A = -k^2/2 applied spectrally; uses its own transform so it never
// counts towards a run's FFT cost.
inline ComplexVector apply_kinetic(const SpectralGrid& g, const ComplexVector& u) {
    Fft f(static_cast<std::size_t>(g.size()));
    const RealVector k = g.wavenumbers();
    ComplexVector w = u;
    f.forward(w);
    w.array() *= (-0.5 * k.array().square()).cast<cplx>();
    f.inverse(w);
    return w;
}

struct Observables {
    double mass;
    double energy;
    double energy_imag;  // should vanish, H is real symmetric
};

inline Observables observables(const SpectralGrid& g, const RealVector& v, const ComplexVector& u) {
    const ComplexVector au = apply_kinetic(g, u);
    const ComplexVector bu = (-v).cast<cplx>().cwiseProduct(u);
    const cplx e = g.dx() * (u.dot(au) + u.dot(bu));
    return {g.dx() * u.squaredNorm(), e.real(), e.imag()};
}

// |[B,[B,[B,A]]] u0| = |(B^3 A - 3 B^2 A B + 3 B A B^2 - A B^3) u0|, weighted norm.
inline double rkn_residual(const SpectralGrid& g, const RealVector& v, const ComplexVector& u0) {
    const ComplexVector b = (-v).cast<cplx>();
    auto B = [&](const ComplexVector& x) -> ComplexVector { return b.cwiseProduct(x); };
    auto A = [&](const ComplexVector& x) { return apply_kinetic(g, x); };
    const ComplexVector w = B(B(B(A(u0)))) - 3.0 * B(B(A(B(u0)))) + 3.0 * B(A(B(B(u0)))) - A(B(B(B(u0))));
    return weighted_norm(g, w);
}

struct DenseHamiltonian {
    ComplexMatrix A, B, H;
};

inline DenseHamiltonian build_dense_hamiltonian(const SpectralGrid& g, const RealVector& v) {
    const int n = g.size();
    if (n > 1024) throw UsageError("build_dense_hamiltonian: N too large for dense work");
    RealMatrix a(n, n);
    for (int j = 0; j < n; ++j) {
        ComplexVector e = ComplexVector::Zero(n);
        e(j) = 1.0;
        a.col(j) = apply_kinetic(g, e).real();
    }
    DenseHamiltonian d;
    d.A = a.cast<cplx>();
    d.B = (-v).cast<cplx>().asDiagonal();
    d.H = d.A + d.B;
    return d;
}

// Exact flow through the eigendecomposition of a real symmetric H, computed once.
class DenseReference {
public:
    explicit DenseReference(const ComplexMatrix& h) : eig_(eig_symmetric(h)) {}

    ComplexVector evaluate(const ComplexVector& u0, double t) const {
        const ComplexVector c = eig_.vectors.transpose().cast<cplx>() * u0;
        ComplexVector phase(c.size());
        for (Eigen::Index j = 0; j < c.size(); ++j) phase(j) = std::exp(I_unit * (t * eig_.values(j))) * c(j);
        return eig_.vectors.cast<cplx>() * phase;
    }

    const SymmetricEigen& eigen() const { return eig_; }

private:
    SymmetricEigen eig_;
};

inline Wavefunction reference_solution(const SpectralGrid& g, const ComplexMatrix& h, const Wavefunction& u0, double t) {
    return {g, DenseReference(h).evaluate(u0.values, t)};
}

// Relative one-step error against the dense reference for each h.
inline std::vector<double> local_errors(const SplittingScheme& s, const SpectralGrid& g, const RealVector& v,
                                        const DenseReference& ref, const ComplexVector& u0,
                                        const std::vector<double>& h_grid) {
    SpectralStepper st(g, v);
    std::vector<double> out;
    const double n0 = weighted_norm(g, u0);
    for (double h : h_grid) {
        ComplexVector u = u0;
        st.step(s, u, h);
        out.push_back(weighted_norm(g, u - ref.evaluate(u0, h)) / n0);
    }
    return out;
}

struct TrajectoryResult {
    DiagnosticSeries series;  // abscissa t: mass_error, energy_error, fft_count
    std::optional<std::size_t> aborted_at;
    std::size_t fft_count = 0;
};

// Long run sampling |M(u_n) - M(u_0)| and |E(u_n) - E(u_0)| every sample_every
// steps (and at the end).
inline TrajectoryResult spectral_conservation_run(const SplittingScheme& s, const SpectralGrid& g,
                                                  const RealVector& v, const ComplexVector& u0, double h,
                                                  std::size_t n_steps, std::size_t sample_every,
                                                  bool merge_boundary = true) {
    if (n_steps < 1 || sample_every < 1) throw UsageError("spectral_conservation_run: n_steps and sample_every must be >= 1");
    SpectralStepper st(g, v);
    const SplitStepPlan p = st.plan(s, h);
    const Observables o0 = observables(g, v, u0);
    TrajectoryResult out{DiagnosticSeries("t", {"mass_error", "energy_error", "fft_count"}), std::nullopt, 0};
    out.series.add_row(0.0, {0.0, 0.0, 0.0});
    ComplexVector u = u0;
    std::size_t done = 0;
    try {
        while (done < n_steps) {
            const std::size_t chunk = std::min(sample_every, n_steps - done);
            st.propagate(p, u, chunk, merge_boundary, done + 1);
            done += chunk;
            const Observables o = observables(g, v, u);
            out.series.add_row(static_cast<double>(done) * h,
                               {std::abs(o.mass - o0.mass), std::abs(o.energy - o0.energy),
                                static_cast<double>(st.fft_count())});
        }
    } catch (const RunAborted& e) {
        out.aborted_at = e.step();
    }
    out.fft_count = st.fft_count();
    return out;
}

struct EfficiencyPoint {
    double h;
    std::size_t fft_count;
    double max_energy_error;
    bool aborted;
};

// max_n |E(u_n) - E(u_0)| over [0, t_final] with n_steps = round(t_final / h).
inline EfficiencyPoint efficiency_point(const SplittingScheme& s, const SpectralGrid& g, const RealVector& v,
                                        const ComplexVector& u0, double h, double t_final) {
    const auto n = static_cast<std::size_t>(std::llround(t_final / h));
    if (n < 1) throw UsageError("efficiency_point: t_final / h rounds to zero steps");
    const auto r = spectral_conservation_run(s, g, v, u0, h, n, 1, true);
    return {h, r.fft_count, r.series.sup("energy_error"), r.aborted_at.has_value()};
}

}  // namespace unisplit
