#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "scheme.hpp"

namespace unisplit {

// Rows of (abscissa, named values), abscissa strictly increasing.
class DiagnosticSeries {
public:
    DiagnosticSeries() = default;
    DiagnosticSeries(std::string abscissa, std::vector<std::string> columns)
        : abscissa_(std::move(abscissa)), columns_(std::move(columns)) {}

    void add_row(double x, std::vector<double> values) {
        if (values.size() != columns_.size()) throw UsageError("DiagnosticSeries: wrong number of values");
        if (!std::isfinite(x)) throw UsageError("DiagnosticSeries: non-finite abscissa");
        for (double v : values)
            if (!std::isfinite(v)) throw UsageError("DiagnosticSeries: non-finite value");
        if (!x_.empty() && !(x > x_.back())) throw UsageError("DiagnosticSeries: abscissa must increase");
        x_.push_back(x);
        rows_.push_back(std::move(values));
    }

    const std::string& abscissa() const { return abscissa_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<double>& x() const { return x_; }
    std::size_t size() const { return x_.size(); }
    bool empty() const { return x_.empty(); }
    const std::vector<double>& row(std::size_t i) const { return rows_.at(i); }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return i;
        throw UsageError("DiagnosticSeries: no column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t k = column_index(name);
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r[k]);
        return out;
    }

    double sup(const std::string& name) const {
        double m = 0.0;
        for (double v : column(name)) m = std::max(m, std::abs(v));
        return m;
    }

    // `#`-prefixed comment lines, a header row, then one line per row at 17 digits.
    std::string to_csv(const std::vector<std::pair<std::string, std::string>>& header = {}) const {
        std::string out;
        for (const auto& [k, v] : header) out += "# " + k + ": " + v + "\n";
        out += abscissa_;
        for (const auto& c : columns_) out += "," + c;
        out += "\n";
        for (std::size_t i = 0; i < x_.size(); ++i) {
            out += format17(x_[i]);
            for (double v : rows_[i]) out += "," + format17(v);
            out += "\n";
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json recs = nlohmann::json::array();
        for (std::size_t i = 0; i < x_.size(); ++i) {
            nlohmann::json r = nlohmann::json::object();
            r[abscissa_] = x_[i];
            for (std::size_t k = 0; k < columns_.size(); ++k) r[columns_[k]] = rows_[i][k];
            recs.push_back(std::move(r));
        }
        return {{"abscissa", abscissa_}, {"columns", columns_}, {"records", recs}};
    }

private:
    std::string abscissa_;
    std::vector<std::string> columns_;
    std::vector<double> x_;
    std::vector<std::vector<double>> rows_;
};

// Ordinary least-squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw UsageError("ols_slope: need two or more paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

inline double drift_slope(const DiagnosticSeries& s, const std::string& column) {
    return ols_slope(s.x(), s.column(column));
}

}  // namespace unisplit
