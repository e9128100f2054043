#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "expr.hpp"
#include "linalg.hpp"

namespace unisplit {

enum class Op { A, B };
enum class Kind { ABA, BAB };

inline const char* to_string(Op op) { return op == Op::A ? "A" : "B"; }
inline const char* to_string(Kind k) { return k == Kind::ABA ? "ABA" : "BAB"; }

struct Factor {
    Op op;
    cplx coef;
};

// Factors are stored in application order: factors.front() acts on the state
// first. In product notation S_h = ... e^{ih c_1 X_1} e^{ih c_0 X_0} the
// rightmost exponential is factors[0].
struct SplittingScheme {
    std::string name;
    Kind kind = Kind::BAB;
    int order = 1;
    bool rkn = false;
    std::vector<Factor> factors;
    std::vector<std::string> notes;

    std::size_t count(Op op) const {
        return static_cast<std::size_t>(std::count_if(
            factors.begin(), factors.end(), [op](const Factor& f) { return f.op == op; }));
    }
    // number of A-exponentials for BAB, one less for ABA
    std::size_t stages() const {
        const std::size_t na = count(Op::A);
        return kind == Kind::ABA && na > 0 ? na - 1 : na;
    }
    cplx sum(Op op) const {
        cplx s = 0.0;
        for (const auto& f : factors)
            if (f.op == op) s += f.coef;
        return s;
    }
};

struct ValidationReport {
    bool consistent = false;
    bool symmetric_conjugate = false;
    bool positive_real_parts = false;
    cplx sum_a;
    cplx sum_b;
};

// Largest elementwise distance between the sequence and its reversed conjugate;
// infinity when the operator tags do not mirror.
inline double reverse_conjugate_defect(const SplittingScheme& s) {
    const auto& f = s.factors;
    double worst = 0.0;
    for (std::size_t i = 0, j = f.size(); i < f.size(); ++i) {
        --j;
        if (f[i].op != f[j].op) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(f[i].coef - std::conj(f[j].coef)));
    }
    return worst;
}

inline double palindrome_defect(const SplittingScheme& s) {
    const auto& f = s.factors;
    double worst = 0.0;
    for (std::size_t i = 0, j = f.size(); i < f.size(); ++i) {
        --j;
        if (f[i].op != f[j].op) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(f[i].coef - f[j].coef));
    }
    return worst;
}

inline bool is_symmetric_conjugate(const SplittingScheme& s, double tol = 1e-14) {
    return reverse_conjugate_defect(s) <= tol;
}

inline bool is_palindromic(const SplittingScheme& s, double tol = 1e-14) {
    return palindrome_defect(s) <= tol;
}

// True when, after dropping zero coefficients, neighbouring factors alternate tags.
inline bool alternates(const SplittingScheme& s) {
    const Factor* prev = nullptr;
    for (const auto& f : s.factors) {
        if (f.coef == cplx(0.0)) continue;
        if (prev && prev->op == f.op) return false;
        prev = &f;
    }
    return true;
}

inline ValidationReport validate(const SplittingScheme& s, double tol = 1e-12) {
    ValidationReport r;
    r.sum_a = s.sum(Op::A);
    r.sum_b = s.sum(Op::B);
    r.consistent = std::abs(r.sum_a - 1.0) <= tol && std::abs(r.sum_b - 1.0) <= tol;
    r.symmetric_conjugate = reverse_conjugate_defect(s) <= tol;
    r.positive_real_parts = std::all_of(s.factors.begin(), s.factors.end(), [&](const Factor& f) {
        if (f.op == Op::A) return std::abs(f.coef.imag()) <= tol && f.coef.real() > 0.0;
        return f.coef.real() > 0.0;
    });
    return r;
}

inline SplittingScheme conjugate_scheme(const SplittingScheme& s) {
    SplittingScheme out = s;
    out.name = "conj(" + s.name + ")";
    for (auto& f : out.factors) f.coef = std::conj(f.coef);
    return out;
}

inline SplittingScheme reverse_scheme(const SplittingScheme& s) {
    SplittingScheme out = s;
    out.name = "rev(" + s.name + ")";
    std::reverse(out.factors.begin(), out.factors.end());
    return out;
}

// One step at h equals s1 at h/2 followed by s2 at h/2.
inline SplittingScheme compose_half(const SplittingScheme& s1, const SplittingScheme& s2) {
    SplittingScheme out;
    out.name = "compose_half(" + s1.name + "," + s2.name + ")";
    out.order = std::min(s1.order, s2.order);
    out.rkn = s1.rkn && s2.rkn;
    auto push = [&](const Factor& f) {
        const Factor g{f.op, 0.5 * f.coef};
        if (!out.factors.empty() && out.factors.back().op == g.op)
            out.factors.back().coef += g.coef;
        else
            out.factors.push_back(g);
    };
    for (const auto& f : s1.factors) push(f);
    for (const auto& f : s2.factors) push(f);
    out.kind = !out.factors.empty() && out.factors.front().op == Op::A ? Kind::ABA : Kind::BAB;
    return out;
}

struct DeltaNorms {
    double a;
    double b;
};

inline DeltaNorms delta_norms(const SplittingScheme& s) {
    DeltaNorms d{0.0, 0.0};
    for (const auto& f : s.factors) (f.op == Op::A ? d.a : d.b) += std::abs(f.coef);
    return d;
}

// ---- JSON ---------------------------------------------------------------

inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json to_json(const SplittingScheme& s) {
    nlohmann::json f = nlohmann::json::array();
    for (const auto& x : s.factors)
        f.push_back({{"op", to_string(x.op)}, {"re", format17(x.coef.real())},
                     {"im", format17(x.coef.imag())}});
    return {{"name", s.name}, {"kind", to_string(s.kind)}, {"order", s.order},
            {"rkn", s.rkn}, {"factors", f}};
}

inline SplittingScheme scheme_from_json(const nlohmann::json& j) {
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw UsageError(std::string("scheme JSON: missing '") + key + "'");
        return j.at(key);
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"name", "kind", "order", "rkn", "factors"};
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return it.key() == k; }) == std::end(known))
            throw UsageError("scheme JSON: unknown field '" + it.key() + "'");
    }
    SplittingScheme s;
    try {
        s.name = need("name").get<std::string>();
        const auto kind = need("kind").get<std::string>();
        if (kind == "ABA") s.kind = Kind::ABA;
        else if (kind == "BAB") s.kind = Kind::BAB;
        else throw UsageError("scheme JSON: kind must be ABA or BAB");
        s.order = need("order").get<int>();
        s.rkn = need("rkn").get<bool>();
        for (const auto& f : need("factors")) {
            const auto op = f.at("op").get<std::string>();
            if (op != "A" && op != "B") throw UsageError("scheme JSON: op must be A or B");
            auto num = [](const nlohmann::json& v) {
                return v.is_string() ? CoefficientExpr::evaluate(v.get<std::string>())
                                     : v.get<double>();
            };
            s.factors.push_back({op == "A" ? Op::A : Op::B, {num(f.at("re")), num(f.at("im"))}});
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("scheme JSON: ") + e.what());
    }
    if (s.order < 1) throw UsageError("scheme JSON: order must be >= 1");
    return s;
}

}  // namespace unisplit
