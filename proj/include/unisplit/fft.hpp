#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"

namespace unisplit {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT with unitary scaling 1/sqrt(N) in both directions.
// forward: X_m = N^{-1/2} sum_j x_j exp(-2 pi i j m / N).
// Every forward or inverse call bumps calls(); one object belongs to one run.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (!is_power_of_two(n)) throw UsageError("Fft: length " + std::to_string(n) + " is not a power of two");
        rev_.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            rev_[i] = r;
        }
        tw_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            tw_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
        scale_ = 1.0 / std::sqrt(static_cast<double>(n));
    }

    std::size_t size() const { return n_; }
    std::size_t calls() const { return calls_; }
    void reset_calls() { calls_ = 0; }

    void forward(std::complex<double>* x) { transform(x, false); }
    void inverse(std::complex<double>* x) { transform(x, true); }

    template <class V>
    void forward(V& v) {
        check(static_cast<std::size_t>(v.size()));
        transform(v.data(), false);
    }
    template <class V>
    void inverse(V& v) {
        check(static_cast<std::size_t>(v.size()));
        transform(v.data(), true);
    }

private:
    void check(std::size_t m) const {
        if (m != n_) throw UsageError("Fft: vector length " + std::to_string(m) + " does not match plan length " + std::to_string(n_));
    }

    void transform(std::complex<double>* x, bool inv) {
        ++calls_;
        for (std::size_t i = 0; i < n_; ++i)
            if (i < rev_[i]) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2, step = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    const std::complex<double> w = inv ? std::conj(tw_[k * step]) : tw_[k * step];
                    const std::complex<double> t = w * x[i + k + half];
                    x[i + k + half] = x[i + k] - t;
                    x[i + k] += t;
                }
            }
        }
        for (std::size_t i = 0; i < n_; ++i) x[i] *= scale_;
    }

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<std::complex<double>> tw_;
    double scale_ = 1.0;
    std::size_t calls_ = 0;
};

}  // namespace unisplit
