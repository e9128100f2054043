#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "error.hpp"
#include "expr.hpp"
#include "scheme.hpp"

namespace unisplit {

// How a printed coefficient is obtained.
enum class Closure {
    None,              // re + i*im as printed
    CentralReal,       // 1 - 2*sum Re(previous of the same list)
    HalfReal,          // 1/2 - sum Re(previous) + i*im
    CentralAsPrinted,  // printed as 1 - 2*sum(previous) with no Re; ambiguous
};

struct CoefficientSpec {
    std::string re;
    std::string im;
    Closure closure = Closure::None;
};

inline CoefficientSpec value(std::string re, std::string im = "0") {
    return {std::move(re), std::move(im), Closure::None};
}
inline CoefficientSpec central() { return {"", "0", Closure::CentralReal}; }
inline CoefficientSpec half(std::string im = "0") { return {"", std::move(im), Closure::HalfReal}; }
inline CoefficientSpec central_as_printed() { return {"", "0", Closure::CentralAsPrinted}; }

// Reduced coefficient lists, up to and including the centre. Expansion mirrors
// them into the full sequence.
struct TableEntry {
    std::string name;
    Kind kind = Kind::BAB;
    int order = 1;
    bool rkn = false;
    std::vector<CoefficientSpec> a;
    std::vector<CoefficientSpec> b;
};

namespace detail {

inline std::vector<cplx> evaluate_list(const std::vector<CoefficientSpec>& specs,
                                       bool literal_central) {
    std::vector<cplx> out;
    for (const auto& c : specs) {
        cplx sum = 0.0;
        for (const auto& p : out) sum += p;
        switch (c.closure) {
            case Closure::None:
                out.emplace_back(CoefficientExpr::evaluate(c.re), CoefficientExpr::evaluate(c.im));
                break;
            case Closure::CentralReal:
                out.emplace_back(1.0 - 2.0 * sum.real(), 0.0);
                break;
            case Closure::HalfReal:
                out.emplace_back(0.5 - sum.real(), CoefficientExpr::evaluate(c.im));
                break;
            case Closure::CentralAsPrinted:
                out.push_back(literal_central ? 1.0 - 2.0 * sum : cplx(1.0 - 2.0 * sum.real(), 0.0));
                break;
        }
    }
    return out;
}

inline SplittingScheme interleave_and_mirror(const TableEntry& e, const std::vector<cplx>& a,
                                             const std::vector<cplx>& b) {
    const bool aba = e.kind == Kind::ABA;
    const auto& first = aba ? a : b;
    const auto& second = aba ? b : a;
    const Op op1 = aba ? Op::A : Op::B;
    const Op op2 = aba ? Op::B : Op::A;

    std::vector<Factor> halfseq;
    for (std::size_t i = 0;; ++i) {
        if (i >= first.size()) break;
        halfseq.push_back({op1, first[i]});
        if (i >= second.size()) break;
        halfseq.push_back({op2, second[i]});
    }
    if (halfseq.size() != a.size() + b.size())
        throw UsageError("expand_entry: " + e.name + " has mismatched a/b list lengths");

    SplittingScheme s;
    s.name = e.name;
    s.kind = e.kind;
    s.order = e.order;
    s.rkn = e.rkn;
    s.factors = halfseq;
    for (std::size_t i = halfseq.size() - 1; i-- > 0;)
        s.factors.push_back({halfseq[i].op, std::conj(halfseq[i].coef)});
    return s;
}

inline bool has_closure(const TableEntry& e, Closure c) {
    auto pred = [c](const CoefficientSpec& s) { return s.closure == c; };
    return std::any_of(e.a.begin(), e.a.end(), pred) || std::any_of(e.b.begin(), e.b.end(), pred);
}

}  // namespace detail

inline SplittingScheme expand_entry(const TableEntry& e, double tol = 1e-12) {
    if (e.a.empty() || e.b.empty()) throw UsageError("expand_entry: " + e.name + " has an empty list");

    auto build = [&](bool literal) {
        return detail::interleave_and_mirror(e, detail::evaluate_list(e.a, literal),
                                             detail::evaluate_list(e.b, literal));
    };
    auto check = [&](const SplittingScheme& s) -> std::string {
        const cplx sa = s.sum(Op::A), sb = s.sum(Op::B);
        if (std::abs(sa - 1.0) > tol)
            return "sum of A-coefficients = " + format17(sa.real()) + " + " + format17(sa.imag()) + "i";
        if (std::abs(sb - 1.0) > tol)
            return "sum of B-coefficients = " + format17(sb.real()) + " + " + format17(sb.imag()) + "i";
        return {};
    };

    if (!detail::has_closure(e, Closure::CentralAsPrinted)) {
        SplittingScheme s = build(false);
        if (auto bad = check(s); !bad.empty())
            throw ValidationError("expand_entry: " + e.name + " is inconsistent: " + bad);
        return s;
    }

    // Printed without Re(): try the literal reading first, fall back to the real-part one.
    SplittingScheme literal = build(true);
    const std::string bad_literal = check(literal);
    if (bad_literal.empty()) {
        literal.notes.push_back("central closure taken literally as 1 - 2*sum(c_i)");
        return literal;
    }
    SplittingScheme re = build(false);
    if (auto bad = check(re); !bad.empty())
        throw ValidationError("expand_entry: " + e.name + " is inconsistent under both closure readings: " +
                              bad_literal + "; " + bad);
    re.notes.push_back("central closure printed as 1 - 2*sum(c_i); literal reading gives " +
                       bad_literal + ", real-part reading 1 - 2*sum Re(c_i) is consistent and used");
    return re;
}

inline const std::vector<TableEntry>& table_entries() {
    static const std::vector<TableEntry> entries = [] {
        std::vector<TableEntry> t;
        // third order, five exponentials
        t.push_back({"S31", Kind::BAB, 3, false,
                     {value("1/2", "sqrt(3)/6")},
                     {value("(1/2)/2", "(sqrt(3)/6)/2"), value("1/2")}});
        t.push_back({"S32", Kind::BAB, 3, false,
                     {value("3/10"), value("2/5")},
                     {value("13/126", "-sqrt(59/2)/63"), value("25/63", "5*sqrt(59/2)/126")}});
        t.push_back({"S4", Kind::BAB, 4, false,
                     {value("3/12", "sqrt(15)/12"), value("1/2")},
                     {value("(3/12)/2", "(sqrt(15)/12)/2"), value("9/24", "sqrt(15)/24")}});

        t.push_back({"NB5s4", Kind::BAB, 4, true,
                     {value("0.17354158169943656"), value("0.19379086394173623"), central()},
                     {value("0.06421454120274125", "0.0245540186592381"),
                      value("0.20166370500451958", "-0.0982277975564409"),
                      half("0.1491719824749133")}});
        t.push_back({"NB6s4", Kind::BAB, 4, true,
                     {value("1/5"), value("0.054855282174763084"), half()},
                     {value("7/100", "0.019444288930263294"),
                      value("0.16", "-0.20579973912385285"),
                      value("0.16251793145097668", "0.21219211957584155"), central()}});
        t.push_back({"NB8s5", Kind::BAB, 5, true,
                     {value("0.13556579817637690"), value("0.12110548685533656"),
                      value("0.040926280383255811"), half()},
                     {value("0.048", "-0.0045117121645322032"),
                      value("0.159", "0.039915395925895825"),
                      value("0.08808186616153123", "-0.19475521098317861"),
                      value("0.08139005735125036", "0.17341123352295854"), central_as_printed()}});
        t.push_back({"NB9s5", Kind::BAB, 5, true,
                     {value("0.066"), value("0.066"), value("0.15406042184345631"),
                      value("0.20434260458660722"), central()},
                     {value("0.03", "-0.026088775868557137"),
                      value("0.065", "0.0871906864166141"),
                      value("0.087791471011534450", "-0.07869869176637824"),
                      value("0.21903826707051549", "0.005649631789653575"),
                      half("0.3080209334852549")}});
        t.push_back({"NA11s6", Kind::ABA, 6, true,
                     {value("0.062770091"), value("0.011912916558090"), value("0.20435669618321"),
                      value("0.019233264988143"), value("0.06593857714457"), half()},
                     {value("0.10891717046144", "-0.16165289456182"),
                      value("0.05673774365156", "0.19084324113721"),
                      value("0.00000000664446", "-0.2132590752834"),
                      value("0.2404799796837", "0.10112304441789"),
                      value("0.04313692053520", "0.11954730647763"), central()}});
        t.push_back({"NB11s6", Kind::BAB, 6, true,
                     {value("213/2500"), value("0.047358568390005"), value("0.1553620075936"),
                      value("0.10012117440925"), value("0.10547836949919"), central()},
                     {value("7/250", "-0.009532915454170"),
                      value("0.08562523731685", "0.0718344013568"),
                      value("0.09331583397900", "-0.09161071812994"),
                      value("0.11799012127542", "0.0702739287203"),
                      value("0.16176918420712", "-0.04327349898459"),
                      half("-0.2203293328195")}});

        t.push_back({"B3s3", Kind::BAB, 3, false,
                     {value("0.4706"), central()},
                     {value("0.1655101882118", "0.03704896872215"), half("-0.6300845020773")}});
        t.push_back({"B5s4", Kind::BAB, 4, false,
                     {value("37/250"), value("0.22446218092466344"), central()},
                     {value("0.05338438633498185", "-0.03218942894140047"),
                      value("0.19561815336463223", "0.0992879758243923"),
                      half("-0.14783578044680548")}});
        t.push_back({"B15s6", Kind::BAB, 6, false,
                     {value("0.08092666015955027"), value("0.06736427978832901"),
                      value("0.057276240999706116"), value("0.06428730473896961"),
                      value("0.05528732144478408"), value("0.02566179136566552"),
                      value("0.10559039215618958"), central()},
                     {value("3/100", "-0.0028985018717006387"),
                      value("0.08826477458499815", "0.019065371639195743"),
                      value("0.07026507350715319", "-0.05226928459003309"),
                      value("0.051044248093469226", "0.07580262639617709"),
                      value("0.040506044227148555", "-0.07981221177569087"),
                      value("0.03061653536468681", "0.07254698089135206"),
                      value("0.10349890449629792", "-0.03539199012223482"),
                      half("0.0111821298374971054")}});

        // real-coefficient references
        t.push_back({"Strang", Kind::ABA, 2, false, {value("1/2")}, {central()}});
        // Strang steps of length g1, g2, g1 with 2 g1 + g2 = 1 and 2 g1^3 + g2^3 = 0
        t.push_back({"TripleJump4", Kind::ABA, 4, false,
                     {value("1/(2-cbrt(2))/2"), value("(1-1/(2-cbrt(2)))/2")},
                     {value("1/(2-cbrt(2))"), central()}});
        return t;
    }();
    return entries;
}

inline const std::vector<SplittingScheme>& catalog() {
    static const std::vector<SplittingScheme> schemes = [] {
        std::vector<SplittingScheme> out;
        for (const auto& e : table_entries()) out.push_back(expand_entry(e));
        return out;
    }();
    return schemes;
}

inline const SplittingScheme& find_scheme(const std::string& name) {
    for (const auto& s : catalog())
        if (s.name == name) return s;
    throw UsageError("unknown scheme '" + name + "'");
}

inline const TableEntry& find_entry(const std::string& name) {
    for (const auto& e : table_entries())
        if (e.name == name) return e;
    throw UsageError("unknown scheme '" + name + "'");
}

}  // namespace unisplit
