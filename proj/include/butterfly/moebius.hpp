#pragma once

// Integer Moebius machinery: 2x2 integer matrices of determinant +-1 acting
// on fractions by p/q -> (a p + b q)/(c p + d q), the sub-semigroup of maps
// sending [0, 1] into itself, and the factorization of that semigroup over
// the two generators
//
//     A = [1 0; 1 1]   theta -> theta / (theta + 1)
//     B = [-1 1; 0 1]  theta -> 1 - theta
//
// Matrices are stored canonically modulo overall sign: the first nonzero
// entry in reading order is positive. factor_word() peels Euclidean quotient
// factors [0 1; 1 k] = A^(k-1) B A off the second column and then rewrites
// the lower-triangular terminal factor into generator letters.

#include <array>
#include <string>
#include <vector>

#include "butterfly/core.hpp"
#include "butterfly/rational.hpp"

namespace butterfly {

struct ProjMat {
    // Canonical representative mod +-I; construct through ProjMat::from.
    i64 a{1}, b{0}, c{0}, d{1};

    static ProjMat from(i64 a, i64 b, i64 c, i64 d) {
        const i64 det = checked_sub(checked_mul(a, d), checked_mul(b, c));
        if (det != 1 && det != -1)
            throw std::invalid_argument("matrix: determinant must be +1 or -1");
        const i64 lead = a != 0 ? a : b != 0 ? b : c != 0 ? c : d;
        ProjMat m;
        if (lead < 0) {
            m.a = -a; m.b = -b; m.c = -c; m.d = -d;
        } else {
            m.a = a; m.b = b; m.c = c; m.d = d;
        }
        return m;
    }

    i64 det() const { return a * d - b * c; }

    friend bool operator==(const ProjMat&, const ProjMat&) = default;
};

inline ProjMat mul(const ProjMat& x, const ProjMat& y) {
    return ProjMat::from(checked_add(checked_mul(x.a, y.a), checked_mul(x.b, y.c)),
                         checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.d)),
                         checked_add(checked_mul(x.c, y.a), checked_mul(x.d, y.c)),
                         checked_add(checked_mul(x.c, y.b), checked_mul(x.d, y.d)));
}

inline ProjMat gen_a() { return ProjMat::from(1, 0, 1, 1); }
inline ProjMat gen_b() { return ProjMat::from(-1, 1, 0, 1); }

inline ProjMat pow_a(i64 n) {
    if (n < 0) throw std::invalid_argument("matrix: negative generator power");
    return ProjMat::from(1, 0, n, 1);
}

// Representative of M mod sign whose value row is positive on (0, 1): the
// sign choice with d > 0, falling back to c > 0 when d == 0. Band-index
// arithmetic in the similarity maps needs this orientation, which need not
// coincide with the storage-canonical one.
inline std::array<i64, 4> pos_den_rep(const ProjMat& m) {
    const bool flip = m.d != 0 ? m.d < 0 : m.c < 0;
    if (flip) return {-m.a, -m.b, -m.c, -m.d};
    return {m.a, m.b, m.c, m.d};
}

// Unreduced image (a p + b q, c p + d q) in the positive-denominator
// orientation. For determinant +-1 the image of a reduced fraction is again
// reduced, so no gcd step is needed downstream.
inline std::pair<i64, i64> lft_apply_raw(const ProjMat& m, const Rational& theta) {
    const auto [a, b, c, d] = pos_den_rep(m);
    const i64 p = checked_add(checked_mul(a, theta.p), checked_mul(b, theta.q));
    const i64 q = checked_add(checked_mul(c, theta.p), checked_mul(d, theta.q));
    if (q == 0) throw std::invalid_argument("lft: pole at " + to_string(theta));
    return {p, q};
}

inline Rational lft_apply(const ProjMat& m, const Rational& theta) {
    const auto [p, q] = lft_apply_raw(m, theta);
    return reduce(p, q);
}

// Does M map [0, 1] into itself? Equivalent to: no pole in [0, 1] (the
// denominator values at 0 and 1 are nonzero with equal sign) and both
// endpoint images b/d and (a+b)/(c+d) lie in [0, 1].
inline bool in_semigroup(const ProjMat& m) {
    const i64 d0 = m.d;
    const i64 d1 = checked_add(m.c, m.d);
    if (d0 == 0 || d1 == 0) return false;
    if ((d0 > 0) != (d1 > 0)) return false;
    const auto in01 = [](i64 num, i64 den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        return 0 <= num && num <= den;
    };
    return in01(m.b, d0) && in01(checked_add(m.a, m.b), d1);
}

enum class Letter : unsigned char { A, B };

struct GeneratorWord {
    std::vector<Letter> letters;

    std::string str() const {
        std::string s;
        s.reserve(letters.size());
        for (const Letter l : letters) s.push_back(l == Letter::A ? 'A' : 'B');
        return s;
    }

    // Left-to-right product: "BAA" evaluates to B * A * A.
    ProjMat matrix() const {
        ProjMat m;
        for (const Letter l : letters) m = mul(m, l == Letter::A ? gen_a() : gen_b());
        return m;
    }

    friend bool operator==(const GeneratorWord&, const GeneratorWord&) = default;
};

inline GeneratorWord parse_word(const std::string& text) {
    GeneratorWord w;
    w.letters.reserve(text.size());
    for (const char ch : text) {
        if (ch == 'A' || ch == 'a')
            w.letters.push_back(Letter::A);
        else if (ch == 'B' || ch == 'b')
            w.letters.push_back(Letter::B);
        else
            throw std::invalid_argument("word: letters must be A or B");
    }
    return w;
}

// Factor a semigroup member into generator letters. Euclid runs on the
// second column (b, d): each quotient k >= 1 peels [0 1; 1 k] = A^(k-1) B A
// on the right, leaving a terminal [t 0; g 1] with t = +-1 that merges into
// the tail of the word:
//   t = +1, g >= 0 : ... A^g
//   t = +1, g = -1 : last quotient becomes A^(k-1) B
//   t = -1, k >= 2 : last quotient becomes A^(k-2) B A B A^g
//   t = -1, k == 1 : last two quotients become A^(k_prev) B A^g
// The word evaluates back to M modulo sign; callers can verify via matrix().
inline GeneratorWord factor_word(const ProjMat& m) {
    if (!in_semigroup(m))
        throw std::invalid_argument("factor: matrix does not map [0, 1] into itself");
    i64 a = m.a, b = m.b, c = m.c, d = m.d;

    GeneratorWord w;
    const auto emit_a = [&w](i64 n) {
        for (i64 i = 0; i < n; ++i) w.letters.push_back(Letter::A);
    };
    const auto emit_b = [&w] { w.letters.push_back(Letter::B); };

    if (b == 0) {
        // Canonical storage plus membership force a = d = 1 and c >= 0.
        emit_a(c);
        return w;
    }
    if (b < 0) {
        a = -a; b = -b; c = -c; d = -d;
    }
    // Now d >= b >= 1 (a semigroup member has b/d in [0, 1]).
    std::vector<i64> quot;
    while (b != 0) {
        const i64 k = d / b;
        quot.push_back(k);
        const i64 a2 = checked_sub(c, checked_mul(k, a));
        const i64 b2 = checked_sub(d, checked_mul(k, b));
        c = a;
        d = b;
        a = a2;
        b = b2;
    }
    // Terminal factor [a 0; c 1]: dets +-1 and gcd(b, d) = 1 force d == 1.
    if (d != 1 || (a != 1 && a != -1))
        throw std::logic_error("factor: malformed terminal factor");
    const i64 g = c;
    const auto emit_quot = [&](i64 k) {
        emit_a(k - 1);
        emit_b();
        emit_a(1);
    };
    if (a == 1 && g >= 0) {
        for (const i64 k : quot) emit_quot(k);
        emit_a(g);
    } else if (a == 1 && g == -1) {
        for (std::size_t i = 0; i + 1 < quot.size(); ++i) emit_quot(quot[i]);
        emit_a(quot.back() - 1);
        emit_b();
    } else if (a == -1 && g >= 0) {
        const i64 last = quot.back();
        if (last >= 2) {
            for (std::size_t i = 0; i + 1 < quot.size(); ++i) emit_quot(quot[i]);
            emit_a(last - 2);
            emit_b();
            emit_a(1);
            emit_b();
            emit_a(g);
        } else {
            if (quot.size() < 2) throw std::logic_error("factor: lone unit quotient");
            for (std::size_t i = 0; i + 2 < quot.size(); ++i) emit_quot(quot[i]);
            emit_a(quot[quot.size() - 2]);
            emit_b();
            emit_a(g);
        }
    } else {
        throw std::logic_error("factor: unreachable terminal shape");
    }
    return w;
}

}  // namespace butterfly
