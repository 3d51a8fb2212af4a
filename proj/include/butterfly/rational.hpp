#pragma once

// Reduced fractions in [0, 1] and Farey enumeration. reduce() is the single
// entry point, so downstream code may assume gcd(p, q) == 1 and 0 <= p <= q
// for every Rational it receives.

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "butterfly/core.hpp"

namespace butterfly {

struct Rational {
    i64 p{0};
    i64 q{1};

    friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational reduce(i64 p, i64 q) {
    if (q == 0) throw std::invalid_argument("rational: zero denominator");
    if (q < 0) {
        p = checked_neg(p);
        q = checked_neg(q);
    }
    if (p < 0 || p > q) throw std::invalid_argument("rational: value outside [0, 1]");
    const i64 g = std::gcd(p, q);
    return Rational{p / g, q / g};
}

inline bool operator<(const Rational& x, const Rational& y) {
    return checked_mul(x.p, y.q) < checked_mul(y.p, x.q);
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.p) / static_cast<double>(r.q);
}

inline std::string to_string(const Rational& r) {
    return std::to_string(r.p) + "/" + std::to_string(r.q);
}

// Accepts "p/q" or a bare integer (denominator 1).
inline Rational parse_rational(const std::string& text) {
    const auto bad = [&] { return std::invalid_argument("rational: cannot parse '" + text + "'"); };
    const auto slash = text.find('/');
    i64 p = 0, q = 1;
    try {
        std::size_t used = 0;
        const std::string num = text.substr(0, slash);
        p = std::stoll(num, &used);
        if (used != num.size()) throw bad();
        if (slash != std::string::npos) {
            const std::string den = text.substr(slash + 1);
            q = std::stoll(den, &used);
            if (used != den.size()) throw bad();
        }
    } catch (const std::invalid_argument&) {
        throw bad();
    } catch (const std::out_of_range&) {
        throw bad();
    }
    return reduce(p, q);
}

// Ascending Farey sequence of order qmax: every reduced p/q in [0, 1] with
// q <= qmax, via the classic next-term recurrence.
inline std::vector<Rational> farey(i64 qmax) {
    if (qmax < 1) throw std::invalid_argument("farey: order must be >= 1");
    std::vector<Rational> out;
    i64 a = 0, b = 1, c = 1, d = qmax;
    out.push_back({a, b});
    while (a != 1 || b != 1) {
        const i64 k = (qmax + b) / d;
        const i64 e = checked_sub(checked_mul(k, c), a);
        const i64 f = checked_sub(checked_mul(k, d), b);
        a = c;
        b = d;
        c = e;
        d = f;
        out.push_back({a, b});
    }
    return out;
}

}  // namespace butterfly
