#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "catalog.hpp"
#include "diagnostics.hpp"
#include "matrix_experiments.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "rng.hpp"
#include "scheme.hpp"
#include "schrodinger.hpp"
#include "version.hpp"

namespace unisplit {

enum class Experiment { SCHEMES_LIST, VALIDATE, DH_SWEEP, CONSERVATION, EFFICIENCY, ORDER, RKN_CHECK };

inline const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::SCHEMES_LIST: return "SCHEMES_LIST";
        case Experiment::VALIDATE: return "VALIDATE";
        case Experiment::DH_SWEEP: return "DH_SWEEP";
        case Experiment::CONSERVATION: return "CONSERVATION";
        case Experiment::EFFICIENCY: return "EFFICIENCY";
        case Experiment::ORDER: return "ORDER";
        case Experiment::RKN_CHECK: return "RKN_CHECK";
    }
    return "?";
}

// Accepts SCHEMES_LIST, schemes_list and schemes-list.
inline Experiment experiment_from_string(std::string s) {
    for (auto& c : s) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (auto e : {Experiment::SCHEMES_LIST, Experiment::VALIDATE, Experiment::DH_SWEEP, Experiment::CONSERVATION,
                   Experiment::EFFICIENCY, Experiment::ORDER, Experiment::RKN_CHECK})
        if (s == to_string(e)) return e;
    throw UsageError("unknown experiment '" + s + "'");
}

struct GridSpec {
    int points = 256;
    double x_min = -8.0;
    double x_max = 8.0;
    double alpha = 1.0;
    double lambda_product = 10.0;
    std::optional<double> clip;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::SCHEMES_LIST;
    std::optional<std::vector<std::string>> schemes;
    std::vector<std::string> scheme_files;
    std::optional<MatrixClassSpec> matrix;
    std::optional<GridSpec> grid;
    std::optional<std::vector<double>> h;
    std::optional<std::vector<double>> tau;
    std::optional<double> t_final;
    std::optional<std::size_t> n_steps;
    std::optional<std::size_t> sample_every;
    double threshold = 1e-10;
    bool comparator = true;
    bool eigenphase = false;
    std::string output = "out";
    std::optional<std::uint64_t> seed;
    nlohmann::json canonical;  // everything that influences results, used for the hash
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw UsageError("unknown field '" + it.key() + "' in " + where);
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError("field '" + key + "' has the wrong type");
    }
}

inline double positive(double v, const std::string& key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("field '" + key + "' must be a positive finite number");
    return v;
}

inline std::vector<double> parse_grid_values(const nlohmann::json& j, const std::string& key) {
    std::vector<double> out;
    if (j.is_number()) {
        out.push_back(j.get<double>());
    } else if (j.is_array()) {
        for (const auto& x : j) {
            if (!x.is_number()) throw UsageError("field '" + key + "' must contain numbers");
            out.push_back(x.get<double>());
        }
    } else if (j.is_object()) {
        if (j.contains("values")) {
            reject_unknown(j, {"values"}, "'" + key + "'");
            return parse_grid_values(j.at("values"), key);
        }
        reject_unknown(j, {"min", "max", "count"}, "'" + key + "'");
        if (!j.contains("min") || !j.contains("max"))
            throw UsageError("'" + key + "' range needs min and max");
        const int count = j.contains("count") ? get_as<int>(j, "count") : 16;
        const double lo = positive(get_as<double>(j, "min"), key + ".min");
        const double hi = positive(get_as<double>(j, "max"), key + ".max");
        if (hi < lo) throw UsageError("'" + key + "' range has max < min");
        if (count < 1) throw UsageError("'" + key + "'.count must be >= 1");
        return log_grid(lo, hi, count);
    } else {
        throw UsageError("field '" + key + "' must be a number, an array or a range object");
    }
    if (out.empty()) throw UsageError("field '" + key + "' is empty");
    for (double v : out) positive(v, key);
    return out;
}

}  // namespace detail

inline std::set<std::string> allowed_fields(Experiment e) {
    std::set<std::string> common{"experiment", "schemes", "scheme_files", "output", "seed"};
    auto add = [&](std::initializer_list<const char*> ks) {
        for (auto k : ks) common.insert(k);
    };
    switch (e) {
        case Experiment::SCHEMES_LIST:
        case Experiment::VALIDATE: break;
        case Experiment::DH_SWEEP: add({"matrix", "h", "threshold"}); break;
        case Experiment::CONSERVATION: add({"matrix", "grid", "h", "t_final", "n_steps", "sample_every", "comparator"}); break;
        case Experiment::EFFICIENCY: add({"grid", "h", "tau", "t_final"}); break;
        case Experiment::ORDER: add({"matrix", "grid", "h", "eigenphase"}); break;
        case Experiment::RKN_CHECK: add({"grid"}); break;
    }
    return common;
}

// Schema-checks a config document. `cli_experiment` wins when given; a
// conflicting "experiment" field is an error. `seed_override` replaces the
// matrix seed.
inline ExperimentConfig parse_config(const nlohmann::json& j, std::optional<Experiment> cli_experiment = std::nullopt,
                                     std::optional<std::uint64_t> seed_override = std::nullopt) {
    using detail::get_as;
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    ExperimentConfig c;
    if (j.contains("experiment")) {
        const auto e = experiment_from_string(get_as<std::string>(j, "experiment"));
        if (cli_experiment && *cli_experiment != e)
            throw UsageError(std::string("config experiment ") + to_string(e) + " conflicts with command line " +
                             to_string(*cli_experiment));
        c.experiment = e;
    } else if (cli_experiment) {
        c.experiment = *cli_experiment;
    } else {
        throw UsageError("no experiment given");
    }
    detail::reject_unknown(j, allowed_fields(c.experiment), "config");

    if (j.contains("schemes")) {
        const auto& s = j.at("schemes");
        if (!s.is_array()) throw UsageError("field 'schemes' must be an array of names");
        std::vector<std::string> names;
        for (const auto& x : s) {
            if (!x.is_string()) throw UsageError("field 'schemes' must be an array of names");
            names.push_back(x.get<std::string>());
        }
        if (names.empty()) throw UsageError("field 'schemes' is empty");
        c.schemes = names;
    }
    if (j.contains("scheme_files")) c.scheme_files = get_as<std::vector<std::string>>(j, "scheme_files");
    if (j.contains("output")) c.output = get_as<std::string>(j, "output");

    std::optional<std::uint64_t> seed;
    if (j.contains("seed")) seed = get_as<std::uint64_t>(j, "seed");
    if (seed_override) seed = seed_override;

    if (j.contains("matrix")) {
        const auto& m = j.at("matrix");
        detail::reject_unknown(m, {"class", "dimension", "seed", "multiplicities"}, "'matrix'");
        MatrixClassSpec ms;
        if (m.contains("class")) ms.cls = matrix_class_from_string(get_as<std::string>(m, "class"));
        if (m.contains("dimension")) ms.dimension = get_as<int>(m, "dimension");
        if (m.contains("seed")) ms.seed = get_as<std::uint64_t>(m, "seed");
        if (m.contains("multiplicities")) ms.multiplicities = get_as<std::vector<int>>(m, "multiplicities");
        if (ms.dimension < 2) throw UsageError("matrix.dimension must be >= 2");
        if (ms.cls == MatrixClass::MULTIPLE_EIGS_DIAG || ms.cls == MatrixClass::MULTIPLE_EIGS_NONSYM_SPLIT) {
            int total = 0;
            for (int k : ms.multiplicities) {
                if (k < 1) throw UsageError("matrix.multiplicities must be positive");
                total += k;
            }
            if (total != ms.dimension) throw UsageError("matrix.multiplicities must sum to matrix.dimension");
        }
        if (seed) ms.seed = *seed;
        c.matrix = ms;
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::reject_unknown(g, {"points", "x_min", "x_max", "alpha", "lambda_product", "clip"}, "'grid'");
        GridSpec gs;
        if (g.contains("points")) gs.points = get_as<int>(g, "points");
        if (g.contains("x_min")) gs.x_min = get_as<double>(g, "x_min");
        if (g.contains("x_max")) gs.x_max = get_as<double>(g, "x_max");
        if (g.contains("alpha")) gs.alpha = detail::positive(get_as<double>(g, "alpha"), "grid.alpha");
        if (g.contains("lambda_product"))
            gs.lambda_product = detail::positive(get_as<double>(g, "lambda_product"), "grid.lambda_product");
        if (g.contains("clip")) gs.clip = detail::positive(get_as<double>(g, "clip"), "grid.clip");
        if (gs.points < 2 || !is_power_of_two(static_cast<std::size_t>(gs.points)))
            throw UsageError("grid.points must be a power of two");
        if (gs.points > 1 << 20) throw UsageError("grid.points is too large");
        if (!(gs.x_max > gs.x_min)) throw UsageError("grid.x_max must exceed grid.x_min");
        c.grid = gs;
    }
    if (c.experiment == Experiment::CONSERVATION && c.matrix && c.grid)
        throw UsageError("CONSERVATION takes either 'matrix' or 'grid', not both");
    if (c.experiment == Experiment::ORDER && c.matrix && c.grid)
        throw UsageError("ORDER takes either 'matrix' or 'grid', not both");

    if (j.contains("h")) c.h = detail::parse_grid_values(j.at("h"), "h");
    if (j.contains("tau")) c.tau = detail::parse_grid_values(j.at("tau"), "tau");
    if (c.h && c.tau) throw UsageError("EFFICIENCY takes either 'h' or 'tau', not both");
    if (j.contains("t_final")) c.t_final = detail::positive(get_as<double>(j, "t_final"), "t_final");
    if (j.contains("n_steps")) {
        c.n_steps = get_as<std::size_t>(j, "n_steps");
        if (*c.n_steps < 1) throw UsageError("n_steps must be >= 1");
    }
    if (j.contains("sample_every")) {
        c.sample_every = get_as<std::size_t>(j, "sample_every");
        if (*c.sample_every < 1) throw UsageError("sample_every must be >= 1");
    }
    if (c.experiment == Experiment::CONSERVATION && c.h && c.h->size() != 1)
        throw UsageError("CONSERVATION takes a single step size 'h'");
    if (j.contains("threshold")) c.threshold = detail::positive(get_as<double>(j, "threshold"), "threshold");
    if (j.contains("comparator")) c.comparator = get_as<bool>(j, "comparator");
    if (j.contains("eigenphase")) c.eigenphase = get_as<bool>(j, "eigenphase");
    if (c.eigenphase && c.grid) throw UsageError("eigenphase is only available for matrix ORDER runs");

    c.seed = seed;
    c.canonical = j;
    c.canonical.erase("output");
    c.canonical["experiment"] = to_string(c.experiment);
    if (seed) c.canonical["seed"] = *seed;
    return c;
}

inline std::string config_hash(const ExperimentConfig& c) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(CounterRng::hash(c.canonical.dump())));
    return buf;
}

// The palindromic complex comparator: s at h/2 followed by conj(s) at h/2.
inline SplittingScheme palindromic_comparator(const SplittingScheme& s) {
    SplittingScheme p = compose_half(s, conjugate_scheme(s));
    p.name = "pal_" + s.name;
    return p;
}

inline SplittingScheme resolve_scheme(const std::string& name, const std::vector<SplittingScheme>& extra = {}) {
    for (const auto& s : extra)
        if (s.name == name) return s;
    const std::string pre = "pal_";
    if (name.rfind(pre, 0) == 0) return palindromic_comparator(resolve_scheme(name.substr(pre.size()), extra));
    return find_scheme(name);
}

struct Artifact {
    std::string filename;
    std::string content;
};

struct RunOutcome {
    int exit_code = 0;
    std::string out;               // human-readable summary for stdout
    std::optional<nlohmann::json> error;  // machine-readable record for stderr
    std::vector<Artifact> artifacts;
};

namespace detail {

using Header = std::vector<std::pair<std::string, std::string>>;

inline Header base_header(const ExperimentConfig& c) {
    return {{"unisplit", version}, {"config-hash", config_hash(c)}, {"experiment", to_string(c.experiment)}};
}

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline std::string safe_name(const std::string& s) {
    std::string o;
    for (char ch : s) o += std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ? ch : '_';
    return o;
}

inline std::string header_text(const Header& h) {
    std::string o;
    for (const auto& [k, v] : h) o += "# " + k + ": " + v + "\n";
    return o;
}

inline std::vector<SplittingScheme> load_scheme_files(const std::vector<std::string>& paths) {
    std::vector<SplittingScheme> out;
    for (const auto& p : paths) {
        std::ifstream f(p);
        if (!f) throw UsageError("cannot open scheme file '" + p + "'");
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("scheme file '" + p + "': " + e.what());
        }
        if (j.is_array())
            for (const auto& x : j) out.push_back(scheme_from_json(x));
        else
            out.push_back(scheme_from_json(j));
    }
    return out;
}

inline std::vector<std::string> default_schemes(Experiment e) {
    switch (e) {
        case Experiment::DH_SWEEP: {
            std::vector<std::string> n;
            for (const auto& s : catalog())
                if (is_symmetric_conjugate(s)) n.push_back(s.name);
            return n;
        }
        case Experiment::CONSERVATION: return {"NB11s6"};
        case Experiment::EFFICIENCY:
            return {"NB5s4", "NB6s4", "NB8s5", "NB9s5", "NA11s6", "NB11s6", "B3s3", "B5s4", "B15s6", "Strang",
                    "TripleJump4"};
        case Experiment::ORDER: return {"Strang", "S31", "S4"};
        default: {
            std::vector<std::string> n;
            for (const auto& s : catalog()) n.push_back(s.name);
            return n;
        }
    }
}

inline RealVector potential_for(const GridSpec& g, const SpectralGrid& grid) {
    RealVector v = pt_potential(grid, g.alpha, g.lambda_product);
    if (g.clip) v = v.cwiseMax(-*g.clip).cwiseMin(*g.clip);
    return v;
}

}  // namespace detail

// The matrix spec in effect: the configured one, or the default class with the seed applied.
inline MatrixClassSpec matrix_spec(const ExperimentConfig& c) {
    if (c.matrix) return *c.matrix;
    MatrixClassSpec m;
    if (c.seed) m.seed = *c.seed;
    return m;
}

inline RunOutcome run(const ExperimentConfig& c, unsigned threads = 1) {
    using namespace detail;
    RunOutcome r;
    const auto extra = load_scheme_files(c.scheme_files);
    std::vector<SplittingScheme> schemes;
    if (c.schemes) {
        for (const auto& n : *c.schemes) schemes.push_back(resolve_scheme(n, extra));
    } else if (!extra.empty()) {
        schemes = extra;
    } else {
        for (const auto& n : default_schemes(c.experiment)) schemes.push_back(resolve_scheme(n));
    }
    if (schemes.empty()) throw UsageError("no schemes selected");
    std::ostringstream out;

    switch (c.experiment) {
        case Experiment::SCHEMES_LIST: {
            std::string csv = header_text(base_header(c));
            csv += "name,kind,order,rkn,stages,a_factors,b_factors,delta_a,delta_b,symmetric_conjugate\n";
            nlohmann::json all = nlohmann::json::array();
            for (const auto& s : schemes) {
                const auto d = delta_norms(s);
                const bool sc = is_symmetric_conjugate(s);
                out << s.name << ", order " << s.order << ", " << s.stages() << " stages, "
                    << "Δ_b = " << fixed(d.b, 3) << ", Δ_a = " << fixed(d.a, 3) << ", " << to_string(s.kind)
                    << (s.rkn ? ", RKN" : "") << (sc ? ", symmetric-conjugate" : "") << "\n";
                csv += s.name + "," + to_string(s.kind) + "," + std::to_string(s.order) + "," + (s.rkn ? "1" : "0") +
                       "," + std::to_string(s.stages()) + "," + std::to_string(s.count(Op::A)) + "," +
                       std::to_string(s.count(Op::B)) + "," + format17(d.a) + "," + format17(d.b) + "," +
                       (sc ? "1" : "0") + "\n";
                all.push_back(to_json(s));
            }
            r.artifacts.push_back({"schemes_list.csv", csv});
            r.artifacts.push_back({"schemes.json", all.dump(2) + "\n"});
            break;
        }
        case Experiment::VALIDATE: {
            std::string csv = header_text(base_header(c));
            csv += "name,consistent,symmetric_conjugate,positive_real_parts,sum_a_re,sum_a_im,sum_b_re,sum_b_im\n";
            for (const auto& s : schemes) {
                const auto v = validate(s);
                auto yn = [](bool b) { return b ? "yes" : "no"; };
                out << s.name << ": consistent=" << yn(v.consistent) << " symmetric_conjugate=" << yn(v.symmetric_conjugate)
                    << " positive_real_parts=" << yn(v.positive_real_parts) << "\n";
                for (const auto& n : s.notes) out << "  note: " << n << "\n";
                csv += s.name + "," + (v.consistent ? "1" : "0") + "," + (v.symmetric_conjugate ? "1" : "0") + "," +
                       (v.positive_real_parts ? "1" : "0") + "," + format17(v.sum_a.real()) + "," +
                       format17(v.sum_a.imag()) + "," + format17(v.sum_b.real()) + "," + format17(v.sum_b.imag()) + "\n";
            }
            r.artifacts.push_back({"validate.csv", csv});
            break;
        }
        case Experiment::DH_SWEEP: {
            const MatrixClassSpec ms = matrix_spec(c);
            const auto m = generate(ms);
            const auto grid = c.h.value_or(log_grid(1e-2, 10.0, 16));
            std::vector<DhSweep> res(schemes.size());
            parallel_for(schemes.size(), threads, [&](std::size_t i) {
                res[i] = dh_sweep(schemes[i], m.A, m.B, grid, c.threshold);
            });
            for (std::size_t i = 0; i < schemes.size(); ++i) {
                auto h = base_header(c);
                h.push_back({"scheme", schemes[i].name});
                h.push_back({"matrix-class", to_string(ms.cls)});
                h.push_back({"dimension", std::to_string(ms.dimension)});
                h.push_back({"seed", std::to_string(ms.seed)});
                h.push_back({"regenerations", std::to_string(m.regenerations)});
                h.push_back({"threshold", format17(c.threshold)});
                h.push_back({"h_star", format17(res[i].h_star)});
                h.push_back({"threshold_exceeded", res[i].exceeded ? "yes" : "no"});
                for (const auto& [hh, e] : res[i].failures) h.push_back({"failed h=" + format17(hh), e});
                r.artifacts.push_back({"dh_sweep_" + safe_name(schemes[i].name) + ".csv", res[i].series.to_csv(h)});
                double dmax = 0.0;
                for (double v : res[i].series.column("D_h")) dmax = std::max(dmax, v);
                out << schemes[i].name << ": h* = " << format17(res[i].h_star) << ", max D_h = " << sci(dmax)
                    << (res[i].exceeded ? "" : " (threshold never exceeded on the grid)") << "\n";
            }
            break;
        }
        case Experiment::CONSERVATION: {
            std::vector<SplittingScheme> runs = schemes;
            if (c.comparator)
                for (const auto& s : schemes)
                    if (is_symmetric_conjugate(s) && !is_palindromic(s)) runs.push_back(palindromic_comparator(s));
            const double h0 = c.h ? c.h->front() : 100.0 / 909.0;
            const double tf = c.t_final.value_or(1e4);
            const std::size_t every = c.sample_every.value_or(100);
            std::optional<nlohmann::json> abort_record;
            for (std::size_t idx = 0; idx < runs.size(); ++idx) {
                const auto& s = runs[idx];
                // a comparator step is two half steps of its base scheme, so it runs at twice
                // the base step to match the FFT cost per unit time
                const bool is_cmp = idx >= schemes.size();
                const double h = is_cmp ? 2.0 * h0 : h0;
                const std::size_t n = c.n_steps ? (is_cmp ? std::max<std::size_t>(1, *c.n_steps / 2) : *c.n_steps)
                                                : static_cast<std::size_t>(std::llround(tf / h));
                auto hd = base_header(c);
                hd.push_back({"scheme", s.name});
                hd.push_back({"h", format17(h)});
                hd.push_back({"n_steps", std::to_string(n)});
                if (is_cmp)
                    hd.push_back({"comparator", "palindromic complex scheme: " + s.name.substr(4) + " at h/2 then its conjugate at h/2, run at twice the base step"});
                DiagnosticSeries series;
                std::optional<std::size_t> aborted;
                std::vector<double> step_index;
                if (c.matrix) {
                    const auto m = generate(*c.matrix);
                    auto ru = substream(c.matrix->seed, "u0");
                    ComplexVector u0(c.matrix->dimension);
                    for (auto& x : u0) x = cplx(ru.uniform(-1.0, 1.0), ru.uniform(-1.0, 1.0));
                    ConservationOptions co;
                    co.projectors = c.matrix->cls != MatrixClass::ARBITRARY;
                    auto cr = conservation_run(s, m.A, m.B, u0, h, n, every, co);
                    series = std::move(cr.series);
                    aborted = cr.aborted_at;
                    step_index = series.x();
                    hd.push_back({"matrix-class", to_string(c.matrix->cls)});
                    hd.push_back({"seed", std::to_string(c.matrix->seed)});
                } else {
                    const GridSpec gs = c.grid.value_or(GridSpec{});
                    const SpectralGrid grid(gs.points, gs.x_min, gs.x_max);
                    const RealVector v = potential_for(gs, grid);
                    auto tr = spectral_conservation_run(s, grid, v, initial_gaussian(grid).values, h, n, every);
                    series = std::move(tr.series);
                    aborted = tr.aborted_at;
                    for (double t : series.x()) step_index.push_back(std::round(t / h));
                    hd.push_back({"grid-points", std::to_string(gs.points)});
                    hd.push_back({"fft_count", std::to_string(tr.fft_count)});
                }
                if (series.size() >= 2) {
                    const double ms = ols_slope(step_index, series.column("mass_error"));
                    const double es = ols_slope(step_index, series.column("energy_error"));
                    hd.push_back({"mass_drift_per_step", format17(ms)});
                    hd.push_back({"energy_drift_per_step", format17(es)});
                    hd.push_back({"sup_mass_error", format17(series.sup("mass_error"))});
                    hd.push_back({"sup_energy_error", format17(series.sup("energy_error"))});
                    out << s.name << ": h = " << format17(h) << ", steps = " << n << ", sup mass error = "
                        << sci(series.sup("mass_error")) << ", sup energy error = " << sci(series.sup("energy_error"))
                        << ", energy drift/step = " << sci(es) << ", mass drift/step = " << sci(ms) << "\n";
                }
                const std::string file = "conservation_" + safe_name(s.name) + ".csv";
                if (aborted) {
                    hd.push_back({"aborted_at_step", std::to_string(*aborted)});
                    out << s.name << ": run aborted at step " << *aborted << "\n";
                    if (!abort_record)
                        abort_record = nlohmann::json{{"error", "run_aborted"}, {"scheme", s.name},
                                                      {"step", *aborted}, {"artifact", file}};
                }
                r.artifacts.push_back({file, series.to_csv(hd)});
            }
            if (abort_record) {
                r.error = abort_record;
                r.exit_code = 3;
            }
            break;
        }
        case Experiment::EFFICIENCY: {
            const GridSpec gs = c.grid.value_or(GridSpec{});
            const SpectralGrid grid(gs.points, gs.x_min, gs.x_max);
            const RealVector v = potential_for(gs, grid);
            const ComplexVector u0 = initial_gaussian(grid).values;
            const double tf = c.t_final.value_or(100.0);
            // default: h = stages * tau, so equal tau means equal FFT count
            const auto tau = c.tau.value_or(log_grid(std::pow(10.0, -2.5), 0.1, 16));
            struct Cell {
                std::size_t scheme;
                double h;
                EfficiencyPoint p;
                std::string err;
            };
            std::vector<Cell> cells;
            for (std::size_t i = 0; i < schemes.size(); ++i) {
                const auto& grid_h = c.h ? *c.h : tau;
                for (double x : grid_h)
                    cells.push_back({i, c.h ? x : x * static_cast<double>(std::max<std::size_t>(1, schemes[i].stages())), {}, {}});
            }
            parallel_for(cells.size(), threads, [&](std::size_t k) {
                try {
                    cells[k].p = efficiency_point(schemes[cells[k].scheme], grid, v, u0, cells[k].h, tf);
                } catch (const std::exception& e) {
                    cells[k].err = e.what();
                }
            });
            for (std::size_t i = 0; i < schemes.size(); ++i) {
                std::vector<const Cell*> mine;
                for (const auto& cell : cells)
                    if (cell.scheme == i && cell.err.empty()) mine.push_back(&cell);
                std::sort(mine.begin(), mine.end(), [](const Cell* a, const Cell* b) { return a->p.fft_count < b->p.fft_count; });
                DiagnosticSeries s("fft_count", {"h", "max_energy_error", "aborted"});
                for (const Cell* cell : mine) {
                    if (!s.empty() && static_cast<double>(cell->p.fft_count) <= s.x().back()) continue;
                    s.add_row(static_cast<double>(cell->p.fft_count),
                              {cell->h, cell->p.max_energy_error, cell->p.aborted ? 1.0 : 0.0});
                }
                auto hd = base_header(c);
                hd.push_back({"scheme", schemes[i].name});
                hd.push_back({"t_final", format17(tf)});
                hd.push_back({"grid-points", std::to_string(gs.points)});
                for (const auto& cell : cells)
                    if (cell.scheme == i && !cell.err.empty()) hd.push_back({"failed h=" + format17(cell.h), cell.err});
                r.artifacts.push_back({"efficiency_" + safe_name(schemes[i].name) + ".csv", s.to_csv(hd)});
                out << schemes[i].name << ": " << s.size() << " points";
                if (!s.empty())
                    out << ", cheapest " << format17(s.x().front()) << " FFTs -> error " << sci(s.row(0)[1])
                        << ", costliest " << format17(s.x().back()) << " FFTs -> error " << sci(s.row(s.size() - 1)[1]);
                out << "\n";
            }
            break;
        }
        case Experiment::ORDER: {
            auto grid_h = c.h.value_or(log_grid(std::pow(10.0, -2.5), 0.1, 16));
            std::sort(grid_h.begin(), grid_h.end());
            std::vector<std::vector<double>> errs(schemes.size()), phase(schemes.size());
            auto hd0 = base_header(c);
            if (c.grid) {
                const SpectralGrid grid(c.grid->points, c.grid->x_min, c.grid->x_max);
                const RealVector v = potential_for(*c.grid, grid);
                const auto dense = build_dense_hamiltonian(grid, v);
                const DenseReference ref(dense.H);
                const ComplexVector u0 = initial_gaussian(grid).values;
                parallel_for(schemes.size(), threads, [&](std::size_t i) {
                    errs[i] = local_errors(schemes[i], grid, v, ref, u0, grid_h);
                });
                hd0.push_back({"problem", "Poschl-Teller, " + std::to_string(c.grid->points) + " points, error relative to |u0|"});
            } else {
                const MatrixClassSpec ms = matrix_spec(c);
                const auto m = generate(ms);
                parallel_for(schemes.size(), threads, [&](std::size_t i) {
                    for (double h : grid_h) {
                        errs[i].push_back((step_matrix(schemes[i], m.A, m.B, h) - exact_propagator(m.H, h)).norm());
                        if (c.eigenphase) phase[i].push_back(eigenphase_error(schemes[i], m.A, m.B, h).error);
                    }
                });
                hd0.push_back({"problem", std::string("matrix ") + to_string(ms.cls) + ", N=" + std::to_string(ms.dimension) +
                                              ", seed " + std::to_string(ms.seed)});
            }
            for (std::size_t i = 0; i < schemes.size(); ++i) {
                auto hd = hd0;
                hd.push_back({"scheme", schemes[i].name});
                hd.push_back({"declared_order", std::to_string(schemes[i].order)});
                std::vector<std::string> cols{"error", "used"};
                if (c.eigenphase) cols.push_back("eigenphase_error");
                DiagnosticSeries s("h", cols);
                std::string line = schemes[i].name + ":";
                try {
                    const auto f = fit_order(grid_h, errs[i]);
                    hd.push_back({"slope", format17(f.slope)});
                    hd.push_back({"fit_points", std::to_string(f.used)});
                    hd.push_back({"plateau_points_excluded", std::to_string(f.excluded_plateau)});
                    line += " local error slope " + fixed(f.slope, 3) + " (" + std::to_string(f.used) + " points)";
                    for (std::size_t k = 0; k < grid_h.size(); ++k) {
                        std::vector<double> row{errs[i][k], f.points[k].used ? 1.0 : 0.0};
                        if (c.eigenphase) row.push_back(phase[i][k]);
                        s.add_row(grid_h[k], row);
                    }
                } catch (const NumericalError& e) {
                    hd.push_back({"slope", "unavailable"});
                    line += std::string(" ") + e.what();
                    for (std::size_t k = 0; k < grid_h.size(); ++k) {
                        std::vector<double> row{errs[i][k], 0.0};
                        if (c.eigenphase) row.push_back(phase[i][k]);
                        s.add_row(grid_h[k], row);
                    }
                }
                if (c.eigenphase) {
                    try {
                        const auto f = fit_order(grid_h, phase[i]);
                        hd.push_back({"eigenphase_slope", format17(f.slope)});
                        line += ", eigenphase slope " + fixed(f.slope, 3);
                    } catch (const NumericalError&) {
                        hd.push_back({"eigenphase_slope", "unavailable"});
                    }
                }
                r.artifacts.push_back({"order_" + safe_name(schemes[i].name) + ".csv", s.to_csv(hd)});
                out << line << "\n";
            }
            break;
        }
        case Experiment::RKN_CHECK: {
            const GridSpec gs = c.grid.value_or(GridSpec{});
            const SpectralGrid grid(gs.points, gs.x_min, gs.x_max);
            const RealVector v = potential_for(gs, grid);
            const ComplexVector u0 = initial_gaussian(grid).values;
            const double res = rkn_residual(grid, v, u0);
            const double rel = res / weighted_norm(grid, u0);
            out << "N = " << gs.points << ": |[B,[B,[B,A]]] u0| = " << sci(res) << " (relative " << sci(rel) << ")\n";
            std::string csv = header_text(base_header(c));
            csv += "points,residual,relative_residual\n";
            csv += std::to_string(gs.points) + "," + format17(res) + "," + format17(rel) + "\n";
            r.artifacts.push_back({"rkn_check.csv", csv});
            break;
        }
    }
    r.out = out.str();
    return r;
}

// Writes artifacts under dir, creating it if needed.
inline std::vector<std::string> write_artifacts(const RunOutcome& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (const auto& a : r.artifacts) {
        const auto p = std::filesystem::path(dir) / a.filename;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << a.content;
        paths.push_back(p.string());
    }
    return paths;
}

}  // namespace unisplit
