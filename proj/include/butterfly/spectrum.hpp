#pragma once

// Band spectra of the almost Mathieu operator at rational frequency p/q.
// The monic integer polynomial P(x) = det(xI - H(0,0)) + 4 is evaluated in
// O(q) through the transfer-matrix trace
//
//     P(x) = tr prod_{j=1..q} [x - v_j, -1; 1, 0] + 2,   v_j = 2cos(2 pi p j / q),
//
// and boundary phases enter only through the Chambers relation
//     det(xI - H(k1,k2)) = P(x) - 2cos(q k1) - 2cos(q k2).
// The spectrum {x : |P(x)| <= 4} splits into q bands; P is strictly monotone
// on each band, so the 2q band edges are simple roots of (P-4)(P+4) except
// for the touching pair at x = 0 when q is even.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "butterfly/core.hpp"
#include "butterfly/rational.hpp"

namespace butterfly {

inline constexpr double kBandTol = 1e-9;     // band membership and edge snapping
inline constexpr double kRootTol = 1e-12;    // bisection interval width
inline constexpr double kTangentTol = 1e-9;  // |P -+ 4| treated as a touching extremum

namespace detail {

// Double-double scalar: value hi + lo with |lo| <= ulp(hi)/2. Transfer
// products grow like exp(c q) while the trace stays O(1), so the entries must
// be carried beyond double precision or the final cancellation leaves an
// absolute error of |entries| * eps, which already reaches 1e-3 by q = 29.
struct dd {
    double hi{0.0};
    double lo{0.0};
};

inline dd dd_make(double a, double b) {
    const double s = a + b;
    const double z = s - a;
    return {s, (a - (s - z)) + (b - z)};
}

inline dd dd_sub(dd a, dd b) {
    dd s = dd_make(a.hi, -b.hi);
    return dd_make(s.hi, s.lo + (a.lo - b.lo));
}

inline dd dd_mul(dd a, dd b) {
    const double p = a.hi * b.hi;
    const double e = std::fma(a.hi, b.hi, -p);
    return dd_make(p, e + (a.hi * b.lo + a.lo * b.hi));
}

// Diagonal values 2cos(2 pi r / q) split into hi + lo so the evaluated
// polynomial is the exact rational-frequency one to ~1e-18 per node; plain
// double nodes would perturb P near the spectrum hull by ~1e-9.
inline std::vector<dd> harper_diagonal_dd(const Rational& theta) {
    const i64 q = theta.q;
    std::vector<dd> v(static_cast<std::size_t>(q));
    const long double w = 2.0L * std::numbers::pi_v<long double>;
    for (i64 j = 1; j <= q; ++j) {
        const i64 r = static_cast<i64>((static_cast<__int128>(theta.p) * j) % q);
        const long double c =
            2.0L * std::cos(w * static_cast<long double>(r) / static_cast<long double>(q));
        const double hi = static_cast<double>(c);
        v[static_cast<std::size_t>(j - 1)] = {hi, static_cast<double>(c - static_cast<long double>(hi))};
    }
    return v;
}

// Root finders evaluate P thousands of times per frequency; rebuilding the
// cosine diagonal on every call would dominate the cost.
inline const std::vector<dd>& harper_diagonal_dd_cached(const Rational& theta) {
    thread_local Rational key{0, 0};
    thread_local std::vector<dd> val;
    if (!(key == theta)) {
        val = harper_diagonal_dd(theta);
        key = theta;
    }
    return val;
}

}  // namespace detail

// Diagonal potential v_j = 2cos(2 pi p j / q) for j = 1..q; the angle is
// reduced through (p j) mod q before the cosine.
template <class F>
std::vector<F> harper_diagonal_t(const Rational& theta) {
    const i64 q = theta.q;
    std::vector<F> v(static_cast<std::size_t>(q));
    const F w = F(2) * std::numbers::pi_v<F>;
    for (i64 j = 1; j <= q; ++j) {
        const i64 r = static_cast<i64>((static_cast<__int128>(theta.p) * j) % q);
        v[static_cast<std::size_t>(j - 1)] = F(2) * std::cos(w * F(r) / F(q));
    }
    return v;
}

inline std::vector<double> harper_diagonal(const Rational& theta) {
    return harper_diagonal_t<double>(theta);
}

namespace detail {

inline const std::vector<double>& harper_diagonal_cached(const Rational& theta) {
    thread_local Rational key{0, 0};
    thread_local std::vector<double> val;
    if (!(key == theta)) {
        val = harper_diagonal(theta);
        key = theta;
    }
    return val;
}

// Plain transfer recurrence over a prebuilt diagonal. Absolute error grows
// with the entries (~1e-3 by q = 30 near the hull), but simple sign-change
// roots move by error/|P'| which stays far below the 1e-12 brackets.
inline double plain_eval(const std::vector<double>& diag, double x) {
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (const double vj : diag) {
        const double t = x - vj;
        const double n00 = t * m00 - m10;
        const double n01 = t * m01 - m11;
        m10 = m00;
        m11 = m01;
        m00 = n00;
        m01 = n01;
    }
    return m00 + m11 + 2.0;
}

}  // namespace detail

template <class F>
F charpoly_eval_t(const Rational& theta, F x) {
    const std::vector<F> v = harper_diagonal_t<F>(theta);
    F m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (const F vj : v) {
        const F t = x - vj;
        const F n00 = t * m00 - m10;
        const F n01 = t * m01 - m11;
        m10 = m00;
        m11 = m01;
        m00 = n00;
        m01 = n01;
    }
    return m00 + m11 + F(2);
}

inline double charpoly_eval(const Rational& theta, double x) {
    // Entry growth is harmless through q = 12; past that the double-double
    // recurrence keeps |P| accurate to ~1e-15 absolute even where the entries
    // reach 1e13 and the trace cancels to O(1).
    if (theta.q <= 12) return detail::plain_eval(detail::harper_diagonal_cached(theta), x);
    const std::vector<detail::dd>& v = detail::harper_diagonal_dd_cached(theta);
    detail::dd m00{1.0, 0.0}, m01{0.0, 0.0}, m10{0.0, 0.0}, m11{1.0, 0.0};
    for (const detail::dd& vj : v) {
        const detail::dd s = detail::dd_make(x, -vj.hi);
        const detail::dd t = detail::dd_make(s.hi, s.lo - vj.lo);
        const detail::dd n00 = detail::dd_sub(detail::dd_mul(t, m00), m10);
        const detail::dd n01 = detail::dd_sub(detail::dd_mul(t, m01), m11);
        m10 = m00;
        m11 = m01;
        m00 = n00;
        m01 = n01;
    }
    const detail::dd tr = detail::dd_make(m00.hi, m11.hi);
    return tr.hi + (tr.lo + (m00.lo + m11.lo) + 2.0);
}

// P and dP/dx together, by forward-mode differentiation of the transfer
// product: T'(v) = [1 0; 0 0] and (TM)' = T'M + TM'.
inline std::pair<double, double> charpoly_eval_deriv(const Rational& theta, double x) {
    const std::vector<double>& v = detail::harper_diagonal_cached(theta);
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    double d00 = 0, d01 = 0, d10 = 0, d11 = 0;
    for (const double vj : v) {
        const double t = x - vj;
        const double n00 = t * m00 - m10;
        const double n01 = t * m01 - m11;
        const double e00 = m00 + t * d00 - d10;
        const double e01 = m01 + t * d01 - d11;
        d10 = d00;
        d11 = d01;
        d00 = e00;
        d01 = e01;
        m10 = m00;
        m11 = m01;
        m00 = n00;
        m01 = n01;
    }
    return {m00 + m11 + 2.0, d00 + d11};
}

struct CharPoly {
    Rational theta;
    std::vector<i64> coeffs;  // monic, descending powers, size q + 1
};

inline double charpoly_eval_coeffs(const std::vector<i64>& coeffs, double x) {
    double acc = 0.0;
    for (const i64 c : coeffs) acc = acc * x + static_cast<double>(c);
    return acc;
}

namespace detail {

using i128 = __int128;

inline i128 i128_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw overflow_error("int128 overflow in add");
    return r;
}

inline i128 i128_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw overflow_error("int128 overflow in sub");
    return r;
}

inline i128 i128_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("int128 overflow in mul");
    return r;
}

}  // namespace detail

// Exact integer coefficients of P. The polynomial is sampled at the q + 1
// consecutive integers centered at 0; each sample is certified to round to
// an integer, forward differences run in 128-bit arithmetic, and the k-th
// divided difference must divide exactly by k! (integer samples of an
// integer polynomial at unit-spaced nodes guarantee this). Failures of the
// certification, of the exact division, or of the int64 range surface as
// numerical_error; the result is verified against the trace evaluation at
// off-node points before it is returned.
inline CharPoly charpoly_coeffs(const Rational& theta) {
    using detail::i128;
    const i64 q = theta.q;
    const i64 m0 = -(q / 2);

    std::vector<i128> dd(static_cast<std::size_t>(q + 1));
    for (i64 i = 0; i <= q; ++i) {
        const long double y = charpoly_eval_t<long double>(theta, static_cast<long double>(m0 + i));
        const long double r = std::round(y);
        if (std::abs(y - r) > 1e-6L * std::max(1.0L, std::abs(y)))
            throw numerical_error("charpoly: sample at integer node failed integrality check");
        if (std::abs(r) > 1e30L)
            throw numerical_error("charpoly: sample magnitude out of certified range");
        dd[static_cast<std::size_t>(i)] = static_cast<i128>(r);
    }

    for (i64 k = 1; k <= q; ++k)
        for (i64 i = q; i >= k; --i)
            dd[static_cast<std::size_t>(i)] =
                detail::i128_sub(dd[static_cast<std::size_t>(i)], dd[static_cast<std::size_t>(i - 1)]);
    i128 fact = 1;
    for (i64 k = 2; k <= q; ++k) {
        fact = detail::i128_mul(fact, k);
        if (dd[static_cast<std::size_t>(k)] % fact != 0)
            throw numerical_error("charpoly: divided difference not divisible by k!");
        dd[static_cast<std::size_t>(k)] /= fact;
    }

    // Newton form -> monomial basis over nodes x_i = m0 + i, Horner style.
    std::vector<i128> acc{dd[static_cast<std::size_t>(q)]};  // descending powers
    for (i64 k = q - 1; k >= 0; --k) {
        const i128 node = m0 + k;
        acc.push_back(0);
        for (std::size_t i = acc.size() - 1; i > 0; --i)
            acc[i] = detail::i128_sub(acc[i], detail::i128_mul(node, acc[i - 1]));
        acc.back() = detail::i128_add(acc.back(), dd[static_cast<std::size_t>(k)]);
    }

    CharPoly out;
    out.theta = theta;
    out.coeffs.reserve(acc.size());
    for (const i128 c : acc) {
        if (c > std::numeric_limits<i64>::max() || c < std::numeric_limits<i64>::min())
            throw numerical_error("charpoly: coefficient does not fit int64");
        out.coeffs.push_back(static_cast<i64>(c));
    }
    if (out.coeffs.front() != 1) throw numerical_error("charpoly: lost monic normalization");

    for (i64 s = 0; s <= 2 * q; ++s) {
        const double x = -4.0 + 8.0 * static_cast<double>(s) / static_cast<double>(2 * q) + 0.0131;
        const double direct = charpoly_eval(theta, x);
        const double horner = charpoly_eval_coeffs(out.coeffs, x);
        if (std::abs(direct - horner) > 1e-9 * std::max(1.0, std::abs(direct)))
            throw numerical_error("charpoly: coefficient round trip failed");
    }
    return out;
}

struct BandSpectrum {
    Rational theta;
    std::vector<double> edges;                     // 2q ascending
    std::vector<std::pair<double, double>> bands;  // q closed intervals
};

namespace detail {

// Roots of P = target located by strict sign changes over the node values;
// nodes where P equals the target exactly count as positive, so tangential
// touches are invisible here by design. For even q the cells meeting x = 0
// are excluded: the only spectral feature there is the touching double root,
// which is injected exactly by the caller, and float noise in P(0) = +-4
// must not fabricate crossings.
inline std::vector<double> bracketed_roots(const Rational& theta, const std::vector<double>& xs,
                                           const std::vector<double>& ps, double target) {
    std::vector<double> roots;
    const bool skip_origin = theta.q % 2 == 0;
    const std::vector<double>& diag = harper_diagonal_cached(theta);
    const auto eval = [&](double x) { return plain_eval(diag, x) - target; };
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (skip_origin && xs[i] <= 0.0 && xs[i + 1] >= 0.0) continue;
        const bool s0 = ps[i] - target >= 0.0;
        const bool s1 = ps[i + 1] - target >= 0.0;
        if (s0 == s1) continue;
        double a = xs[i], b = xs[i + 1];
        while (b - a > kRootTol) {
            const double m = 0.5 * (a + b);
            if ((eval(m) >= 0.0) == s0)
                a = m;
            else
                b = m;
        }
        roots.push_back(0.5 * (a + b));
    }
    return roots;
}

// The q-1 interior extrema of P, one per spectral gap. They are simple roots
// of P' separated by at least a full band width, so sign-change bracketing
// with bounded densification is reliable even when the gaps themselves are
// far below double resolution.
inline std::vector<double> charpoly_extrema(const Rational& theta) {
    const i64 q = theta.q;
    if (q == 1) return {};
    const auto dval = [&](double x) { return charpoly_eval_deriv(theta, x).second; };
    for (i64 density = 64; density <= 4096; density *= 4) {
        const i64 cells = density * q;
        std::vector<double> xs(static_cast<std::size_t>(cells + 1)), ds(xs.size());
        for (i64 i = 0; i <= cells; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            xs[s] = -4.001 + 8.002 * static_cast<double>(i) / static_cast<double>(cells);
            ds[s] = dval(xs[s]);
        }
        std::vector<double> ext;
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            const bool s0 = ds[i] >= 0.0;
            if (s0 == (ds[i + 1] >= 0.0)) continue;
            double a = xs[i], b = xs[i + 1];
            while (b - a > kRootTol) {
                const double m = 0.5 * (a + b);
                if ((dval(m) >= 0.0) == s0)
                    a = m;
                else
                    b = m;
            }
            ext.push_back(0.5 * (a + b));
        }
        if (static_cast<i64>(ext.size()) == q - 1) return ext;
    }
    throw numerical_error("band edges: extremum count mismatch for " + to_string(theta));
}

// One root of P = target on [a, b], where P is monotone because a and b are
// consecutive extrema (or points beyond the outermost edges). An endpoint
// whose value already sits on the target within noise is a numerically closed
// gap; both adjacent intervals then return the extremum itself, collapsing
// the edge pair to a double point exactly like a touching gap.
inline double monotone_root(const Rational& theta, double a, double b, double pa, double pb,
                            double target) {
    const double ga = pa - target;
    const double gb = pb - target;
    if (std::abs(ga) <= kTangentTol) return a;
    if (std::abs(gb) <= kTangentTol) return b;
    const bool sa = ga >= 0.0;
    if (sa == (gb >= 0.0))
        throw numerical_error("band edges: lost crossing on a monotone interval");
    double lo = a, hi = b;
    while (hi - lo > kRootTol) {
        const double m = 0.5 * (lo + hi);
        if ((charpoly_eval(theta, m) - target >= 0.0) == sa)
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Band decomposition of the spectrum. Edges are bracketed on a uniform grid
// over [-4.001, 4.001] and bisected to 1e-12; the grid is densified once if a
// narrow gap slips between nodes. For even q the parity of P forces P(0) = +-4
// with a double root, which no sign change can see; that pair is injected by
// hand. Gaps can be narrower than any representable spacing (widths decay
// double-exponentially in q), so when bracketing still comes up short the
// edges are rebuilt from the extrema of P: between consecutive extrema P is
// strictly monotone and crosses each of +-4 exactly once, and an extremum
// sitting on +-4 within noise is a closed gap contributing a double edge.
// Only if that reconstruction also fails is numerical_error raised.
inline BandSpectrum band_edges(const Rational& theta) {
    const i64 q = theta.q;
    std::vector<double> roots_hi, roots_lo;
    for (i64 density = 64; density <= 256; density *= 4) {
        const i64 cells = density * q;
        std::vector<double> xs(static_cast<std::size_t>(cells + 1)), ps(xs.size());
        const std::vector<double>& diag = detail::harper_diagonal_cached(theta);
        for (i64 i = 0; i <= cells; ++i) {
            xs[static_cast<std::size_t>(i)] =
                -4.001 + 8.002 * static_cast<double>(i) / static_cast<double>(cells);
            ps[static_cast<std::size_t>(i)] = detail::plain_eval(diag, xs[static_cast<std::size_t>(i)]);
        }
        roots_hi = detail::bracketed_roots(theta, xs, ps, 4.0);
        roots_lo = detail::bracketed_roots(theta, xs, ps, -4.0);
        if (q % 2 == 0) {
            const double p0 = charpoly_eval(theta, 0.0);
            if (std::abs(std::abs(p0) - 4.0) > 1e-6)
                throw numerical_error("band edges: central value drifted from +-4");
            auto& touched = p0 > 0.0 ? roots_hi : roots_lo;
            touched.push_back(0.0);
            touched.push_back(0.0);
        }
        if (static_cast<i64>(roots_hi.size()) == q && static_cast<i64>(roots_lo.size()) == q) break;
        roots_hi.clear();
        roots_lo.clear();
    }
    if (roots_hi.empty()) {
        const std::vector<double> ext = detail::charpoly_extrema(theta);
        std::vector<double> cuts;
        cuts.reserve(ext.size() + 2);
        cuts.push_back(-4.001);
        cuts.insert(cuts.end(), ext.begin(), ext.end());
        cuts.push_back(4.001);
        std::vector<double> vals(cuts.size());
        for (std::size_t i = 0; i < cuts.size(); ++i) vals[i] = charpoly_eval(theta, cuts[i]);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            roots_hi.push_back(
                detail::monotone_root(theta, cuts[i], cuts[i + 1], vals[i], vals[i + 1], 4.0));
            roots_lo.push_back(
                detail::monotone_root(theta, cuts[i], cuts[i + 1], vals[i], vals[i + 1], -4.0));
        }
    }

    std::sort(roots_hi.begin(), roots_hi.end());
    std::sort(roots_lo.begin(), roots_lo.end());

    BandSpectrum bs;
    bs.theta = theta;
    bs.edges.resize(static_cast<std::size_t>(2 * q));
    std::merge(roots_hi.begin(), roots_hi.end(), roots_lo.begin(), roots_lo.end(), bs.edges.begin());
    for (double& e : bs.edges)
        if (std::abs(e) < kBandTol) e = 0.0;
    bs.bands.reserve(static_cast<std::size_t>(q));
    for (i64 k = 0; k < q; ++k) {
        const double lo = bs.edges[static_cast<std::size_t>(2 * k)];
        const double hi = bs.edges[static_cast<std::size_t>(2 * k + 1)];
        if (hi < lo) throw numerical_error("band edges: inverted band");
        bs.bands.emplace_back(lo, hi);
    }
    for (i64 k = 1; k < q; ++k)
        if (bs.bands[static_cast<std::size_t>(k)].first <
            bs.bands[static_cast<std::size_t>(k - 1)].second - kRootTol)
            throw numerical_error("band edges: overlapping bands");
    return bs;
}

// Dense almost Mathieu matrix at Bloch phases (k1, k2), row-major q x q.
inline std::vector<std::complex<double>> harper_matrix(const Rational& theta, double k1, double k2) {
    using cplx = std::complex<double>;
    const i64 q = theta.q;
    const std::size_t n = static_cast<std::size_t>(q);
    std::vector<cplx> h(n * n, cplx{0.0, 0.0});
    const cplx z1 = std::polar(1.0, k1);
    const double w = 2.0 * std::numbers::pi * static_cast<double>(theta.p) / static_cast<double>(theta.q);
    for (std::size_t j = 0; j < n; ++j)
        h[j * n + j] = 2.0 * std::cos(k2 + w * static_cast<double>(j + 1));
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i = (j + 1) % n;  // cyclic shift U[(j+1) mod q][j] = 1
        h[i * n + j] += z1;
        h[j * n + i] += std::conj(z1);
    }
    return h;
}

// Determinant of a dense complex matrix by partial-pivot LU.
inline std::complex<double> dense_det(std::vector<std::complex<double>> m, i64 n) {
    using cplx = std::complex<double>;
    const std::size_t nn = static_cast<std::size_t>(n);
    cplx det{1.0, 0.0};
    for (std::size_t k = 0; k < nn; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < nn; ++i)
            if (std::abs(m[i * nn + k]) > std::abs(m[piv * nn + k])) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < nn; ++j) std::swap(m[k * nn + j], m[piv * nn + j]);
            det = -det;
        }
        const cplx pivot = m[k * nn + k];
        if (pivot == cplx{0.0, 0.0}) return {0.0, 0.0};
        det *= pivot;
        for (std::size_t i = k + 1; i < nn; ++i) {
            const cplx f = m[i * nn + k] / pivot;
            for (std::size_t j = k; j < nn; ++j) m[i * nn + j] -= f * m[k * nn + j];
        }
    }
    return det;
}

// |det(xI - H(k1,k2)) + 2cos(q k1) + 2cos(q k2) - P(x)|: zero up to roundoff
// for every phase pair, which is the phase-independence statement behind the
// band decomposition.
inline double chambers_residual(const Rational& theta, double x, double k1, double k2) {
    using cplx = std::complex<double>;
    const i64 q = theta.q;
    const std::size_t n = static_cast<std::size_t>(q);
    std::vector<cplx> m = harper_matrix(theta, k1, k2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = (i == j ? cplx{x, 0.0} : cplx{0.0, 0.0}) - m[i * n + j];
    const cplx det = dense_det(std::move(m), q);
    const cplx lhs = det + 2.0 * std::cos(static_cast<double>(q) * k1) + 2.0 * std::cos(static_cast<double>(q) * k2);
    return std::abs(lhs - charpoly_eval(theta, x));
}

// Insertion-once cache of band spectra keyed by (p, q); safe to share across
// threads.
class SpectrumCache {
  public:
    std::shared_ptr<const BandSpectrum> get(const Rational& theta) {
        {
            const std::lock_guard<std::mutex> lk(mu_);
            if (const auto it = map_.find({theta.p, theta.q}); it != map_.end()) return it->second;
        }
        auto fresh = std::make_shared<const BandSpectrum>(band_edges(theta));
        const std::lock_guard<std::mutex> lk(mu_);
        return map_.try_emplace({theta.p, theta.q}, std::move(fresh)).first->second;
    }

    std::size_t size() const {
        const std::lock_guard<std::mutex> lk(mu_);
        return map_.size();
    }

  private:
    mutable std::mutex mu_;
    std::map<std::pair<i64, i64>, std::shared_ptr<const BandSpectrum>> map_;
};

// Fetch through the cache when one is supplied, compute otherwise.
inline std::shared_ptr<const BandSpectrum> spectrum_for(const Rational& theta, SpectrumCache* cache) {
    if (cache) return cache->get(theta);
    return std::make_shared<const BandSpectrum>(band_edges(theta));
}

}  // namespace butterfly
