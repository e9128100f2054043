#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "error.hpp"

namespace unisplit {

// Evaluates the small real-valued expressions used to store coefficients:
// decimal literals, + - * /, parentheses, sqrt(...) and cbrt(...).
// A bare decimal literal is converted with correct rounding; anything else
// is evaluated in long double and rounded once at the end.
class CoefficientExpr {
public:
    static double evaluate(std::string_view text) {
        std::string_view t = trim(text);
        if (t.empty()) return 0.0;
        double direct = 0.0;
        const char* first = t.data();
        const char* last = t.data() + t.size();
        auto [p, ec] = std::from_chars(first, last, direct);
        if (ec == std::errc() && p == last) return direct;

        CoefficientExpr e(t);
        long double v = e.expr();
        e.skip_ws();
        if (e.pos_ != e.s_.size())
            throw UsageError("coefficient expression: trailing input in '" + std::string(text) + "'");
        return static_cast<double>(v);
    }

private:
    explicit CoefficientExpr(std::string_view s) : s_(s) {}

    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw UsageError("coefficient expression: " + msg + " in '" + std::string(s_) + "'");
    }

    long double expr() {
        long double v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    long double term() {
        long double v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) {
                long double d = unary();
                if (d == 0.0L) fail("division by zero");
                v /= d;
            } else return v;
        }
    }

    long double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return primary();
    }

    long double primary() {
        skip_ws();
        if (eat('(')) {
            long double v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string_view name = s_.substr(start, pos_ - start);
            if (!eat('(')) fail("expected '(' after function name");
            long double arg = expr();
            if (!eat(')')) fail("missing ')'");
            if (name == "sqrt") {
                if (arg < 0.0L) fail("sqrt of negative value");
                return std::sqrt(arg);
            }
            if (name == "cbrt") return std::cbrt(arg);
            fail("unknown function '" + std::string(name) + "'");
        }
        return number();
    }

    long double number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                s_[pos_] == 'e' || s_[pos_] == 'E' ||
                ((s_[pos_] == '-' || s_[pos_] == '+') && pos_ > start &&
                 (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
            ++pos_;
        if (start == pos_) fail("expected a number");
        std::string lit(s_.substr(start, pos_ - start));
        std::size_t used = 0;
        long double v = std::stold(lit, &used);
        if (used != lit.size()) fail("malformed number '" + lit + "'");
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace unisplit
