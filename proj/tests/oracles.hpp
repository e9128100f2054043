#pragma once
// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

// Truncated Taylor series, no scaling. Only meant for small norms.
inline CMat taylor_expm(const CMat& m, int terms = 30) {
    CMat sum = CMat::Identity(m.rows(), m.cols());
    CMat term = sum;
    for (int k = 1; k <= terms; ++k) {
        term = term * m / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

// Eigen's own (unsupported module) matrix exponential.
inline CMat eigen_expm(const CMat& m) { return m.exp(); }

inline RMat random_real(std::mt19937_64& g, int n, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    RMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = d(g);
    return m;
}

inline RMat random_symmetric(std::mt19937_64& g, int n) {
    const RMat m = random_real(g, n);
    return 0.5 * (m + m.transpose());
}

inline CMat random_complex(std::mt19937_64& g, int n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, 1.0);
    CMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * cplx(d(g), d(g));
    return m;
}

inline CVec random_vector(std::mt19937_64& g, int n) {
    std::normal_distribution<double> d(0.0, 1.0);
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(d(g), d(g));
    return v;
}

// O(N^2) DFT with unitary scaling and the e^{-2 pi i jm/N} forward sign.
inline CVec naive_dft(const CVec& x, bool inverse = false) {
    const auto n = x.size();
    CVec out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (Eigen::Index m = 0; m < n; ++m) {
        cplx s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            s += x(j) * std::polar(1.0, sgn * 2.0 * std::numbers::pi * static_cast<double>(j * m) / static_cast<double>(n));
        out(m) = s / std::sqrt(static_cast<double>(n));
    }
    return out;
}

// Largest over a of the distance to the nearest b.
inline double set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (cplx x : a) {
        double best = std::numeric_limits<double>::infinity();
        for (cplx y : b) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

// Multiset match by greedy assignment, returns the worst paired distance.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (cplx x : a) {
        std::size_t best = 0;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < b.size(); ++k)
            if (std::abs(x - b[k]) < d) {
                d = std::abs(x - b[k]);
                best = k;
            }
        worst = std::max(worst, d);
        b.erase(b.begin() + static_cast<long>(best));
    }
    return worst;
}

// log-log least squares slope
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

}  // namespace oracle
