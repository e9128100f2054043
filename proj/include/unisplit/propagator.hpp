#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "scheme.hpp"

namespace unisplit {

struct CostModel {
    std::size_t a_applications = 0;
    std::size_t b_applications = 0;
};

// Exponential actions of the two split operators: exp_A(z, u) = e^{zA} u.
struct StepOperatorPair {
    std::function<ComplexVector(cplx, const ComplexVector&)> exp_A;
    std::function<ComplexVector(cplx, const ComplexVector&)> exp_B;
};

inline ComplexMatrix step_matrix(const SplittingScheme& s, const ComplexMatrix& a,
                                 const ComplexMatrix& b, double h) {
    detail::require_square(a, "step_matrix");
    detail::require_same_shape(a, b, "step_matrix");
    const Eigen::Index n = a.rows();
    ComplexMatrix m = ComplexMatrix::Identity(n, n);
    if (h == 0.0) return m;
    for (const auto& f : s.factors) {
        const ComplexMatrix& op = f.op == Op::A ? a : b;
        m = expm((I_unit * h * f.coef) * op) * m;
    }
    return m;
}

inline ComplexVector apply_scheme(const SplittingScheme& s, const StepOperatorPair& ops,
                                  const ComplexVector& u, double h, CostModel& cost) {
    ComplexVector v = u;
    for (const auto& f : s.factors) {
        const cplx z = I_unit * h * f.coef;
        if (f.op == Op::A) {
            v = ops.exp_A(z, v);
            ++cost.a_applications;
        } else {
            v = ops.exp_B(z, v);
            ++cost.b_applications;
        }
        if (v.size() != u.size()) throw UsageError("apply_scheme: operator changed the state dimension");
    }
    return v;
}

inline ComplexVector apply_scheme(const SplittingScheme& s, const StepOperatorPair& ops,
                                  const ComplexVector& u, double h) {
    CostModel c;
    return apply_scheme(s, ops, u, h, c);
}

// Exact dense actions, for cross-checking matrix-free backends.
inline StepOperatorPair dense_operator_pair(const ComplexMatrix& a, const ComplexMatrix& b) {
    detail::require_same_shape(a, b, "dense_operator_pair");
    auto act = [](const ComplexMatrix& m) {
        return [m](cplx z, const ComplexVector& u) -> ComplexVector {
            if (u.size() != m.rows()) throw UsageError("dense operator: dimension mismatch");
            if (z == cplx(0.0)) return u;
            return expm(z * m) * u;
        };
    };
    return {act(a), act(b)};
}

inline ComplexMatrix exact_propagator(const ComplexMatrix& h_mat, double t) {
    detail::require_square(h_mat, "exact_propagator");
    return expm((I_unit * t) * h_mat);
}

struct ReversibilityReport {
    double sc2_residual = 0.0;  // |conj(S_h) S_h - I|_F
    double sc3_residual = 0.0;  // |conj(S_h)^T - S_{-h}|_F, only when A, B symmetric
    bool sc3_reported = false;
};

inline ReversibilityReport reversibility_report(const SplittingScheme& s, const ComplexMatrix& a,
                                                const ComplexMatrix& b, double h) {
    const ComplexMatrix sh = step_matrix(s, a, b, h);
    const Eigen::Index n = a.rows();
    ReversibilityReport r;
    r.sc2_residual = (sh.conjugate() * sh - ComplexMatrix::Identity(n, n)).norm();
    const double tol = 1e-12 * std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
    const bool symmetric = (a - a.transpose()).cwiseAbs().maxCoeff() <= tol &&
                           (b - b.transpose()).cwiseAbs().maxCoeff() <= tol;
    if (symmetric) {
        r.sc3_reported = true;
        r.sc3_residual = (sh.adjoint() - step_matrix(s, a, b, -h)).norm();
    }
    return r;
}

struct OrderPoint {
    double h;
    double error;
    bool used;
};

struct OrderFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<OrderPoint> points;
    std::vector<double> residuals;  // of the used points, in log space
    std::size_t excluded_plateau = 0;
    std::size_t used = 0;
};

// Least squares of log(error) against log(h) over points with error in [lo, hi].
inline OrderFit fit_order(const std::vector<double>& h, const std::vector<double>& err,
                          double lo = 1e-12, double hi = 1e-1) {
    if (h.size() != err.size()) throw UsageError("fit_order: size mismatch");
    OrderFit f;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const bool ok = err[i] >= lo && err[i] <= hi && h[i] > 0.0;
        if (err[i] < 1e-13) ++f.excluded_plateau;
        f.points.push_back({h[i], err[i], ok});
        if (ok) {
            x.push_back(std::log(h[i]));
            y.push_back(std::log(err[i]));
        }
    }
    f.used = x.size();
    if (x.size() < 2) throw NumericalError("fit_order: fewer than two points inside the fit window");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) f.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
    return f;
}

// Local error |S_h - expm(ih(A+B))|_F over the grid, fitted in log-log.
inline OrderFit empirical_order(const SplittingScheme& s, const ComplexMatrix& a,
                                const ComplexMatrix& b, const std::vector<double>& h_grid) {
    std::vector<double> err;
    for (double h : h_grid) err.push_back((step_matrix(s, a, b, h) - exact_propagator(a + b, h)).norm());
    return fit_order(h_grid, err);
}

struct EigenphaseResult {
    double error = 0.0;
    bool ambiguous = false;
};

// Pairs the eigenvalues of S_h with the exact phases e^{ih lambda_j} (greedy
// nearest neighbour after sorting by argument) and returns the worst distance.
inline EigenphaseResult eigenphase_error(const SplittingScheme& s, const ComplexMatrix& a,
                                         const ComplexMatrix& b, double h) {
    const ComplexMatrix hm = a + b;
    if (h == 0.0) return {};
    auto omega = eig_general(step_matrix(s, a, b, h));
    const auto se = eig_symmetric(hm);
    std::vector<cplx> exact;
    for (Eigen::Index j = 0; j < se.values.size(); ++j) exact.push_back(std::exp(I_unit * (h * se.values(j))));
    auto by_arg = [](cplx x, cplx y) { return std::arg(x) < std::arg(y); };
    std::sort(omega.begin(), omega.end(), by_arg);
    std::sort(exact.begin(), exact.end(), by_arg);

    EigenphaseResult r;
    std::vector<bool> taken(exact.size(), false);
    for (const cplx w : omega) {
        std::size_t best = exact.size();
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        for (std::size_t k = 0; k < exact.size(); ++k) {
            if (taken[k]) continue;
            const double d = std::abs(w - exact[k]);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                best = k;
            } else if (d < d2) {
                d2 = d;
            }
        }
        taken[best] = true;
        if (d2 <= 2.0 * d1) r.ambiguous = true;
        r.error = std::max(r.error, d1);
    }
    return r;
}

}  // namespace unisplit
