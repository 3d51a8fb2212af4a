#pragma once

// Integrated density of states of the free two-dimensional hopping operator
// and the band-resolved trace formula for rational frequencies.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "butterfly/rational.hpp"
#include "butterfly/spectrum.hpp"

namespace butterfly {

namespace detail {

// Adaptive Simpson with Richardson correction; eps is an absolute target.
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double eps) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace detail

// F(x): normalized area of {(s,t) in [0,pi]^2 : 2cos s + 2cos t < x}. The
// inner angle reduces to pi - arccos of a clamped argument; the clamp
// boundaries are square-root kinks, so the stretches where the integrand is
// exactly 0 or pi are split off before quadrature runs on the smooth middle.
inline double ids_F(double x, double abs_tol = 1e-8) {
    constexpr double pi = std::numbers::pi;
    if (x <= -4.0) return 0.0;
    if (x >= 4.0) return 1.0;
    // u(t) = (x - 2cos t)/2 increases from (x-2)/2 to (x+2)/2 on [0, pi].
    const double t_lo = x <= 0.0 ? std::acos(0.5 * (x + 2.0)) : 0.0;  // u <= -1 left of here
    const double t_hi = x >= 0.0 ? std::acos(0.5 * (x - 2.0)) : pi;   // u >= +1 right of here
    const auto g = [x](double t) {
        const double u = std::clamp(0.5 * (x - 2.0 * std::cos(t)), -1.0, 1.0);
        return pi - std::acos(u);
    };
    const double smooth = detail::integrate(g, t_lo, t_hi, abs_tol * pi * pi);
    return (smooth + (pi - t_hi) * pi) / (pi * pi);
}

// Monotone evaluator wrapper carrying the quadrature tolerance, with
// inversion by bisection (F is strictly increasing on [-4, 4]).
struct IDSEvaluator {
    double abs_tol{1e-8};

    double operator()(double x) const { return ids_F(x, abs_tol); }

    double invert(double y) const {
        if (y <= 0.0) return -4.0;
        if (y >= 1.0) return 4.0;
        double lo = -4.0, hi = 4.0;
        while (hi - lo > 1e-10) {
            const double m = 0.5 * (lo + hi);
            (ids_F(m, abs_tol) < y ? lo : hi) = m;
        }
        return 0.5 * (lo + hi);
    }
};

// Normalized eigenvalue counting function ("trace of the spectral projection
// below x"): exactly k/q in the k-th gap, and inside band k the free IDS of
// the sign-adjusted characteristic polynomial fills in the fractional part.
// The sign (-1)^(k+q) orients each band so the adjusted polynomial rises
// from -4 to +4, which makes the formula continuous across band edges.
inline double trace_below(const BandSpectrum& bs, double x) {
    const i64 q = bs.theta.q;
    for (i64 k = q; k >= 1; --k) {
        const auto& band = bs.bands[static_cast<std::size_t>(k - 1)];
        if (x > band.second + kBandTol) return static_cast<double>(k) / static_cast<double>(q);
        if (x >= band.first - kBandTol) {
            const double sign = (k + q) % 2 == 0 ? 1.0 : -1.0;
            const double v = std::clamp(sign * charpoly_eval(bs.theta, x), -4.0, 4.0);
            return (static_cast<double>(k - 1) + ids_F(v)) / static_cast<double>(q);
        }
    }
    return 0.0;
}

inline double trace_below(const Rational& theta, double x) {
    return trace_below(band_edges(theta), x);
}

}  // namespace butterfly
