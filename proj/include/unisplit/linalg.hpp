#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace unisplit {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

struct LinalgOptions {
    double max_condition = 1e14;      // solve() refuses beyond this estimate
    int qr_iterations_per_eigenvalue = 60;
    double symmetry_tolerance = 1e-12;
};

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw UsageError(std::string(who) + ": matrix must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw UsageError(std::string(who) + ": dimension mismatch");
}

inline double norm1(const ComplexMatrix& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace detail

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }
inline bool all_finite(const ComplexVector& v) { return v.allFinite(); }

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw UsageError("multiply: inner dimensions differ");
    return a * b;
}

inline ComplexVector multiply(const ComplexMatrix& a, const ComplexVector& v) {
    if (a.cols() != v.size()) throw UsageError("multiply: matrix/vector dimensions differ");
    return a * v;
}

inline ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_shape(a, b, "add");
    return a + b;
}

inline ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }
inline ComplexMatrix transpose(const ComplexMatrix& m) { return m.transpose(); }
inline ComplexMatrix conjugate(const ComplexMatrix& m) { return m.conjugate(); }
inline double frobenius(const ComplexMatrix& m) { return m.norm(); }

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_square(a, "commutator");
    detail::require_same_shape(a, b, "commutator");
    return a * b - b * a;
}

// Solves M X = R. Throws NumericalError carrying the 1-norm condition estimate
// when M is too close to singular.
inline ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs,
                           const LinalgOptions& opt = {}) {
    detail::require_square(m, "solve");
    if (rhs.rows() != m.rows()) throw UsageError("solve: right-hand side has wrong row count");
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    // rcond() reports 1 when a pivot is exactly zero, so check the pivots first
    const auto piv = lu.matrixLU().diagonal().cwiseAbs();
    const double rc = (piv.minCoeff() == 0.0 || !piv.allFinite()) ? 0.0 : lu.rcond();
    if (!(rc > 0.0) || 1.0 / rc > opt.max_condition)
        throw NumericalError("solve: matrix is numerically singular",
                             rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    return lu.solve(rhs);
}

inline ComplexVector solve(const ComplexMatrix& m, const ComplexVector& b,
                           const LinalgOptions& opt = {}) {
    ComplexMatrix x = solve(m, ComplexMatrix(b), opt);
    return x.col(0);
}

inline ComplexMatrix inverse(const ComplexMatrix& m, const LinalgOptions& opt = {}) {
    return solve(m, ComplexMatrix(ComplexMatrix::Identity(m.rows(), m.cols())), opt);
}

// Scaling and squaring with the [13/13] Pade approximant (Higham 2005 coefficients).
inline ComplexMatrix expm(const ComplexMatrix& m) {
    detail::require_square(m, "expm");
    const Eigen::Index n = m.rows();
    if (m.isZero(0.0)) return ComplexMatrix::Identity(n, n);
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double nrm = detail::norm1(m);
    if (!std::isfinite(nrm)) throw NumericalError("expm: non-finite input");
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    const ComplexMatrix a = m / std::ldexp(1.0, s);
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;

    ComplexMatrix u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
    u += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    u = a * u;
    ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
    v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    ComplexMatrix r = Eigen::PartialPivLU<ComplexMatrix>(v - u).solve(v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

namespace detail {

// Householder reduction to upper Hessenberg form, in place.
inline void hessenberg(ComplexMatrix& h) {
    const Eigen::Index n = h.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        ComplexVector x = h.block(k + 1, k, n - k - 1, 1);
        const double xn = x.norm();
        if (xn == 0.0) continue;
        const cplx x0 = x(0);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0, 0.0);
        ComplexVector v = x;
        v(0) += phase * xn;
        const double vn = v.norm();
        if (vn == 0.0) continue;
        v /= vn;
        // H <- (I - 2 v v*) H (I - 2 v v*)
        auto rows = h.block(k + 1, 0, n - k - 1, n);
        rows -= 2.0 * v * (v.adjoint() * rows);
        auto cols = h.block(0, k + 1, n, n - k - 1);
        cols -= 2.0 * (cols * v) * v.adjoint();
        h.block(k + 2, k, n - k - 2, 1).setZero();
    }
}

struct Givens {
    double c;
    cplx s;
};

inline Givens make_givens(cplx x, cplx y) {
    const double ax = std::abs(x);
    const double r = std::hypot(ax, std::abs(y));
    if (r == 0.0) return {1.0, 0.0};
    if (ax == 0.0) return {0.0, 1.0};
    return {ax / r, (x / ax) * std::conj(y) / r};
}

}  // namespace detail

// All eigenvalues of a general complex matrix, unordered. Hessenberg reduction
// followed by single-shift QR sweeps with Wilkinson shifts and deflation.
inline std::vector<cplx> eig_general(const ComplexMatrix& m, const LinalgOptions& opt = {}) {
    detail::require_square(m, "eig_general");
    if (!m.allFinite()) throw NumericalError("eig_general: non-finite input");
    const Eigen::Index n = m.rows();
    ComplexMatrix h = m;
    detail::hessenberg(h);
    const double eps = std::numeric_limits<double>::epsilon();
    const double hnorm = h.norm();

    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n));
    std::vector<detail::Givens> rot(static_cast<std::size_t>(n));

    Eigen::Index hi = n - 1;
    int iter = 0;
    int total = 0;
    const int max_total = opt.qr_iterations_per_eigenvalue * static_cast<int>(n);
    while (hi >= 0) {
        Eigen::Index lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h(lo, lo - 1));
            double scale = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
            if (scale == 0.0) scale = hnorm;
            if (sub <= eps * scale) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            out.push_back(h(hi, hi));
            --hi;
            iter = 0;
            continue;
        }
        if (++total > max_total)
            throw NumericalError("eig_general: QR iteration did not converge");
        ++iter;

        cplx mu;
        if (iter % 11 == 0) {
            // exceptional shift to break cycles
            mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx tr2 = 0.5 * (a + d);
            const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
            const cplx l1 = tr2 + disc, l2 = tr2 - disc;
            mu = std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
        }

        for (Eigen::Index k = lo; k <= hi; ++k) h(k, k) -= mu;
        for (Eigen::Index k = lo; k < hi; ++k) {
            const auto g = detail::make_givens(h(k, k), h(k + 1, k));
            rot[static_cast<std::size_t>(k)] = g;
            for (Eigen::Index j = k; j <= hi; ++j) {
                const cplx t1 = h(k, j), t2 = h(k + 1, j);
                h(k, j) = g.c * t1 + g.s * t2;
                h(k + 1, j) = -std::conj(g.s) * t1 + g.c * t2;
            }
            h(k + 1, k) = 0.0;
        }
        for (Eigen::Index k = lo; k < hi; ++k) {
            const auto& g = rot[static_cast<std::size_t>(k)];
            const Eigen::Index last = std::min(k + 1, hi);
            for (Eigen::Index i = lo; i <= last; ++i) {
                const cplx t1 = h(i, k), t2 = h(i, k + 1);
                h(i, k) = g.c * t1 + std::conj(g.s) * t2;
                h(i, k + 1) = -g.s * t1 + g.c * t2;
            }
        }
        for (Eigen::Index k = lo; k <= hi; ++k) h(k, k) += mu;
    }
    return out;
}

struct SymmetricEigen {
    RealVector values;   // ascending
    RealMatrix vectors;  // orthonormal columns
};

inline RealMatrix real_symmetric_part_checked(const ComplexMatrix& s, double tol,
                                              const char* who) {
    detail::require_square(s, who);
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if (s.imag().cwiseAbs().maxCoeff() > tol * scale)
        throw UsageError(std::string(who) + ": matrix has non-real entries");
    const RealMatrix r = s.real();
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw UsageError(std::string(who) + ": matrix is not symmetric");
    return r;
}

inline SymmetricEigen eig_symmetric(const ComplexMatrix& s, const LinalgOptions& opt = {}) {
    const RealMatrix r = real_symmetric_part_checked(s, opt.symmetry_tolerance, "eig_symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(r);
    if (es.info() != Eigen::Success) throw NumericalError("eig_symmetric: solver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace unisplit
