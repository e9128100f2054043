#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "rng.hpp"
#include "scheme.hpp"

namespace unisplit {

enum class MatrixClass {
    SYM_SIMPLE,
    SYM_SIMPLE_NONSYM_SPLIT,
    REAL_SIMPLE_EIGS,
    ARBITRARY,
    MULTIPLE_EIGS_DIAG,
    MULTIPLE_EIGS_NONSYM_SPLIT,
};

inline const char* to_string(MatrixClass c) {
    switch (c) {
        case MatrixClass::SYM_SIMPLE: return "SYM_SIMPLE";
        case MatrixClass::SYM_SIMPLE_NONSYM_SPLIT: return "SYM_SIMPLE_NONSYM_SPLIT";
        case MatrixClass::REAL_SIMPLE_EIGS: return "REAL_SIMPLE_EIGS";
        case MatrixClass::ARBITRARY: return "ARBITRARY";
        case MatrixClass::MULTIPLE_EIGS_DIAG: return "MULTIPLE_EIGS_DIAG";
        case MatrixClass::MULTIPLE_EIGS_NONSYM_SPLIT: return "MULTIPLE_EIGS_NONSYM_SPLIT";
    }
    return "?";
}

inline MatrixClass matrix_class_from_string(const std::string& s) {
    for (auto c : {MatrixClass::SYM_SIMPLE, MatrixClass::SYM_SIMPLE_NONSYM_SPLIT,
                   MatrixClass::REAL_SIMPLE_EIGS, MatrixClass::ARBITRARY,
                   MatrixClass::MULTIPLE_EIGS_DIAG, MatrixClass::MULTIPLE_EIGS_NONSYM_SPLIT})
        if (s == to_string(c)) return c;
    throw UsageError("unknown matrix class '" + s + "'");
}

struct MatrixClassSpec {
    MatrixClass cls = MatrixClass::SYM_SIMPLE;
    int dimension = 10;
    std::uint64_t seed = 1;
    std::vector<int> multiplicities{3, 3, 2, 2};  // MULTIPLE_* only
};

struct MatrixTriple {
    ComplexMatrix H, A, B;
    int regenerations = 0;
    std::vector<std::string> notes;
};

struct GeneratorOptions {
    double min_gap = 1e-6;
    double max_condition_P = 1e4;    // REAL_SIMPLE_EIGS eigenvector matrix
    double min_imag_arbitrary = 1e-3;  // ARBITRARY must have a non-real eigenvalue pair
    int max_attempts = 100;
};

namespace detail {

inline RealMatrix uniform_matrix(CounterRng& r, int n, double lo = 0.0, double hi = 1.0) {
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = r.uniform(lo, hi);
    return m;
}

inline RealMatrix sym_part(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

inline double min_gap_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i) g = std::min(g, v[i] - v[i - 1]);
    return g;
}

}  // namespace detail

// Same spec gives bit-identical matrices: all draws come from counter-based
// substreams keyed by (seed, purpose, attempt).
inline MatrixTriple generate(const MatrixClassSpec& spec, const GeneratorOptions& opt = {}) {
    const int n = spec.dimension;
    if (n < 2) throw UsageError("generate: dimension must be >= 2");
    const bool multiple = spec.cls == MatrixClass::MULTIPLE_EIGS_DIAG ||
                          spec.cls == MatrixClass::MULTIPLE_EIGS_NONSYM_SPLIT;
    if (multiple) {
        int total = 0;
        for (int m : spec.multiplicities) {
            if (m < 1) throw UsageError("generate: multiplicities must be positive");
            total += m;
        }
        if (total != n) throw UsageError("generate: multiplicity pattern must sum to the dimension");
    }

    const bool sym_split = spec.cls == MatrixClass::SYM_SIMPLE || spec.cls == MatrixClass::MULTIPLE_EIGS_DIAG;
    auto ra = substream(spec.seed, "A");
    const RealMatrix a_raw = detail::uniform_matrix(ra, n);
    const RealMatrix a = sym_split ? detail::sym_part(a_raw) : a_raw;

    MatrixTriple out;
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        RealMatrix h0;
        std::string reject;
        switch (spec.cls) {
            case MatrixClass::SYM_SIMPLE:
            case MatrixClass::SYM_SIMPLE_NONSYM_SPLIT: {
                auto r = substream(spec.seed, "H", static_cast<std::uint64_t>(attempt));
                h0 = detail::sym_part(detail::uniform_matrix(r, n));
                break;
            }
            case MatrixClass::REAL_SIMPLE_EIGS: {
                auto r = substream(spec.seed, "H", static_cast<std::uint64_t>(attempt));
                const RealMatrix p = detail::uniform_matrix(r, n);
                std::vector<double> lam(static_cast<std::size_t>(n));
                for (auto& l : lam) l = r.uniform(0.0, 0.5 * n);
                Eigen::JacobiSVD<RealMatrix> svd(p);
                const auto sv = svd.singularValues();
                const double cond = sv(0) / sv(n - 1);
                if (!(cond < opt.max_condition_P)) {
                    reject = "eigenvector matrix condition " + format17(cond);
                    break;
                }
                if (detail::min_gap_sorted(lam) < opt.min_gap) {
                    reject = "eigenvalue gap below tolerance";
                    break;
                }
                RealVector d(n);
                for (int i = 0; i < n; ++i) d(i) = lam[static_cast<std::size_t>(i)];
                h0 = p * d.asDiagonal() * p.inverse();
                break;
            }
            case MatrixClass::ARBITRARY: {
                auto r = substream(spec.seed, "H", static_cast<std::uint64_t>(attempt));
                h0 = detail::uniform_matrix(r, n);
                Eigen::EigenSolver<RealMatrix> es(h0, false);
                if (es.eigenvalues().imag().cwiseAbs().maxCoeff() < opt.min_imag_arbitrary)
                    reject = "no non-real eigenvalue pair";
                break;
            }
            case MatrixClass::MULTIPLE_EIGS_DIAG:
            case MatrixClass::MULTIPLE_EIGS_NONSYM_SPLIT: {
                auto r = substream(spec.seed, "H", static_cast<std::uint64_t>(attempt));
                const RealMatrix g = detail::uniform_matrix(r, n, -1.0, 1.0);
                const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(g).householderQ();
                std::vector<double> distinct;
                for (std::size_t k = 0; k < spec.multiplicities.size(); ++k) distinct.push_back(r.uniform(-1.0, 1.0));
                if (distinct.size() > 1 && detail::min_gap_sorted(distinct) < opt.min_gap) {
                    reject = "designed eigenvalues too close";
                    break;
                }
                RealVector d(n);
                int pos = 0;
                for (std::size_t k = 0; k < distinct.size(); ++k)
                    for (int m = 0; m < spec.multiplicities[k]; ++m) d(pos++) = distinct[k];
                h0 = detail::sym_part(q * d.asDiagonal() * q.transpose());
                break;
            }
        }
        if (reject.empty() &&
            (spec.cls == MatrixClass::SYM_SIMPLE || spec.cls == MatrixClass::SYM_SIMPLE_NONSYM_SPLIT)) {
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(h0, Eigen::EigenvaluesOnly);
            const RealVector ev = es.eigenvalues();
            if (detail::min_gap_sorted({ev.data(), ev.data() + ev.size()}) < opt.min_gap)
                reject = "eigenvalue gap below tolerance";
        }
        if (!reject.empty()) {
            out.notes.push_back("attempt " + std::to_string(attempt) + " rejected: " + reject);
            ++out.regenerations;
            continue;
        }
        // B = H - A, then H is recomputed as A + B so that the split identity is exact
        const RealMatrix b = h0 - a;
        out.A = a.cast<cplx>();
        out.B = b.cast<cplx>();
        out.H = (a + b).cast<cplx>();
        return out;
    }
    throw NumericalError("generate: no acceptable matrix after " + std::to_string(opt.max_attempts) + " attempts");
}

// D_h = max_j | |omega_j| - 1 | for the eigenvalues omega_j of S_h.
inline double unit_modulus_defect(const ComplexMatrix& sh) {
    double d = 0.0;
    for (const cplx w : eig_general(sh)) d = std::max(d, std::abs(std::abs(w) - 1.0));
    return d;
}

struct DhSweep {
    DiagnosticSeries series;  // abscissa h, column D_h
    double h_star = 0.0;      // largest grid h below the first h with D_h > threshold
    bool exceeded = false;    // whether any grid point went above threshold
    std::vector<std::pair<double, std::string>> failures;
};

inline std::vector<double> log_grid(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0) || !(hi >= lo)) throw UsageError("log_grid: need 0 < lo <= hi and count >= 1");
    std::vector<double> g;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        g.push_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
    }
    return g;
}

inline DhSweep dh_sweep(const SplittingScheme& s, const ComplexMatrix& a, const ComplexMatrix& b,
                        std::vector<double> h_grid, double threshold = 1e-10, unsigned threads = 1) {
    std::sort(h_grid.begin(), h_grid.end());
    h_grid.erase(std::unique(h_grid.begin(), h_grid.end()), h_grid.end());
    std::vector<double> d(h_grid.size(), 0.0);
    std::vector<std::string> err(h_grid.size());
    parallel_for(h_grid.size(), threads, [&](std::size_t i) {
        try {
            d[i] = unit_modulus_defect(step_matrix(s, a, b, h_grid[i]));
        } catch (const std::exception& e) {
            err[i] = e.what();
        }
    });

    DhSweep out;
    out.series = DiagnosticSeries("h", {"D_h"});
    bool crossed = false;
    for (std::size_t i = 0; i < h_grid.size(); ++i) {
        if (!err[i].empty()) {
            out.failures.emplace_back(h_grid[i], err[i]);
            continue;
        }
        out.series.add_row(h_grid[i], {d[i]});
        if (d[i] > threshold) {
            out.exceeded = true;
            crossed = true;
        }
        if (!crossed) out.h_star = h_grid[i];
    }
    return out;
}

struct SpectralProjector {
    double eigenvalue;
    int multiplicity;
    ComplexMatrix projector;
};

// Spectral projectors of a real diagonalizable H with real eigenvalues,
// eigenvalues closer than group_tol merged into one eigenspace.
inline std::vector<SpectralProjector> spectral_projectors(const ComplexMatrix& h, double group_tol = 1e-6) {
    detail::require_square(h, "spectral_projectors");
    const Eigen::Index n = h.rows();
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (h.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw UsageError("spectral_projectors: H must be real");
    const RealMatrix r = h.real();
    const bool symmetric = (r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;

    std::vector<double> vals;
    ComplexMatrix right, left;  // Pi_g = right[:, g] * left[g, :]
    if (symmetric) {
        const auto se = eig_symmetric(h);
        vals.assign(se.values.data(), se.values.data() + n);
        right = se.vectors.cast<cplx>();
        left = se.vectors.transpose().cast<cplx>();
    } else {
        Eigen::EigenSolver<RealMatrix> es(r);
        if (es.info() != Eigen::Success) throw NumericalError("spectral_projectors: eigensolver failed");
        const auto ev = es.eigenvalues();
        if (ev.imag().cwiseAbs().maxCoeff() > 1e-8 * scale)
            throw UsageError("spectral_projectors: unsupported class, H has complex eigenvalues");
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return ev(x).real() < ev(y).real(); });
        right.resize(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            right.col(k) = es.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
            vals.push_back(ev(idx[static_cast<std::size_t>(k)]).real());
        }
        left = inverse(right);
    }

    std::vector<SpectralProjector> out;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        if (k < n && vals[static_cast<std::size_t>(k)] - vals[static_cast<std::size_t>(k - 1)] <= group_tol) continue;
        const Eigen::Index m = k - start;
        double mean = 0.0;
        for (Eigen::Index j = start; j < k; ++j) mean += vals[static_cast<std::size_t>(j)];
        ComplexMatrix p = right.middleCols(start, m) * left.middleRows(start, m);
        out.push_back({mean / static_cast<double>(m), static_cast<int>(m), std::move(p)});
        start = k;
    }
    return out;
}

struct ConservationResult {
    DiagnosticSeries series;  // abscissa n
    std::optional<std::size_t> aborted_at;
};

struct ConservationOptions {
    bool projectors = true;
    double overflow = 1e12;
};

// Repeated application of the dense step matrix, sampling
// |M(u_n) - M(u_0)|, |E(u_n) - E(u_0)| and per-eigenspace norm changes.
inline ConservationResult conservation_run(const SplittingScheme& s, const ComplexMatrix& a,
                                           const ComplexMatrix& b, const ComplexVector& u0, double h,
                                           std::size_t n_steps, std::size_t sample_every,
                                           const ConservationOptions& opt = {}) {
    if (n_steps < 1) throw UsageError("conservation_run: n_steps must be >= 1");
    if (sample_every < 1) throw UsageError("conservation_run: sample_every must be >= 1");
    if (u0.size() != a.rows()) throw UsageError("conservation_run: state dimension mismatch");
    const ComplexMatrix hm = a + b;
    const ComplexMatrix sh = step_matrix(s, a, b, h);
    std::vector<SpectralProjector> proj;
    if (opt.projectors) proj = spectral_projectors(hm);

    std::vector<std::string> cols{"mass_error", "energy_error"};
    for (std::size_t k = 0; k < proj.size(); ++k) cols.push_back("proj_" + std::to_string(k));
    ConservationResult out{DiagnosticSeries("n", cols), std::nullopt};

    auto mass = [](const ComplexVector& u) { return u.squaredNorm(); };
    auto energy = [&](const ComplexVector& u) { return u.dot(hm * u).real(); };
    const double m0 = mass(u0), e0 = energy(u0);
    std::vector<double> p0;
    for (const auto& p : proj) p0.push_back((p.projector * u0).norm());

    auto record = [&](std::size_t n, const ComplexVector& u) {
        std::vector<double> row{std::abs(mass(u) - m0), std::abs(energy(u) - e0)};
        for (std::size_t k = 0; k < proj.size(); ++k) row.push_back(std::abs((proj[k].projector * u).norm() - p0[k]));
        out.series.add_row(static_cast<double>(n), std::move(row));
    };

    ComplexVector u = u0;
    record(0, u);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        u = sh * u;
        const double nu = u.norm();
        if (!std::isfinite(nu) || nu > opt.overflow) {
            out.aborted_at = n;
            return out;
        }
        if (n % sample_every == 0 || n == n_steps) record(n, u);
    }
    return out;
}

}  // namespace unisplit
