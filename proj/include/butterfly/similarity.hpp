#pragma once

// Self-similarity maps of the butterfly: a vertical Mobius action on the
// frequency, a band re-indexing offset, and a horizontal map defined by
// equating sign-adjusted characteristic polynomials band by band.

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "butterfly/core.hpp"
#include "butterfly/moebius.hpp"
#include "butterfly/rational.hpp"
#include "butterfly/spectrum.hpp"

namespace butterfly {

enum class Sign : unsigned char { plus, minus };

struct Similarity {
    ProjMat m;
    i64 r{0};
    Sign sign{Sign::plus};

    friend bool operator==(const Similarity&, const Similarity&) = default;
};

// Largest admissible re-indexing offset: the image of band q must still fit,
// r*p' + q <= q' (plus) or r*(q'-p') + q <= q' (minus), for every frequency.
// In terms of theta = p/q the bound is (c theta + d - 1) / (a theta + b)
// resp. (c theta + d - 1) / ((c-a) theta + (d-b)), a Mobius function of theta
// with no pole inside [0, 1], so its minimum sits at an endpoint. A zero
// denominator means the endpoint imposes no constraint at all.
inline i64 r_max(const ProjMat& m, Sign sign) {
    if (!in_semigroup(m)) throw std::invalid_argument("similarity: matrix does not map [0,1] into itself");
    const auto [a, b, c, d] = pos_den_rep(m);
    i64 best = std::numeric_limits<i64>::max();
    for (const i64 t : {i64{0}, i64{1}}) {
        const i64 num = checked_sub(checked_add(checked_mul(c, t), d), 1);
        const i64 den = sign == Sign::plus
                            ? checked_add(checked_mul(a, t), b)
                            : checked_add(checked_mul(checked_sub(c, a), t), checked_sub(d, b));
        if (den == 0) continue;
        best = std::min(best, num / den);
    }
    if (best == std::numeric_limits<i64>::max())
        throw std::logic_error("similarity: offset bound unconstrained at both endpoints");
    return best;
}

inline void validate_similarity(const Similarity& s) {
    if (s.r < 0) throw std::invalid_argument("similarity: negative offset");
    if (s.r > r_max(s.m, s.sign))
        throw std::invalid_argument("similarity: offset exceeds the admissible bound");
}

inline Similarity make_similarity(const ProjMat& m, i64 r, Sign sign) {
    Similarity s{m, r, sign};
    validate_similarity(s);
    return s;
}

// Image frequency, with the determinant-preserves-gcd fact asserted: the
// unreduced image of a reduced fraction must already be reduced.
inline Rational map_theta(const Similarity& s, const Rational& theta) {
    const auto [pu, qu] = lft_apply_raw(s.m, theta);
    const Rational img = reduce(pu, qu);
    if (img.q != qu) throw std::logic_error("similarity: image fraction failed to stay reduced");
    return img;
}

// k' = r*p' + k (plus) or r*(q'-p') + k (minus), via the unreduced image.
inline i64 map_band_index(const Similarity& s, const Rational& theta, i64 k) {
    validate_similarity(s);
    if (k < 1 || k > theta.q) throw std::invalid_argument("similarity: band index out of range");
    const auto [pu, qu] = lft_apply_raw(s.m, theta);
    const i64 stride = s.sign == Sign::plus ? pu : checked_sub(qu, pu);
    const i64 kk = checked_add(checked_mul(s.r, stride), k);
    if (kk < 1 || kk > qu) throw std::logic_error("similarity: image band index escaped its range");
    return kk;
}

// 1-based index of the band containing x, 0 if x is outside every band
// (beyond the 1e-9 membership tolerance). When x falls in the closure of two
// bands meeting at a (possibly numerically closed) gap, the band where x is
// the nearer endpoint wins; an exact tie goes to the right band.
inline i64 locate_band(const BandSpectrum& bs, double x) {
    const i64 q = static_cast<i64>(bs.bands.size());
    for (i64 k = 1; k <= q; ++k) {
        const auto& band = bs.bands[static_cast<std::size_t>(k - 1)];
        if (x > band.second + kBandTol) continue;
        if (x < band.first - kBandTol) return 0;
        if (k < q) {
            const auto& next = bs.bands[static_cast<std::size_t>(k)];
            if (x >= next.first - kBandTol &&
                std::abs(x - next.first) <= std::abs(x - band.second))
                return k + 1;
        }
        return k;
    }
    return 0;
}

struct MappedPoint {
    Rational theta_out;
    std::vector<double> points;       // one value, or two ascending at a split
    std::vector<i64> band_index_out;  // parallel to points
};

// Horizontal map on a spectrum point: equate the sign-adjusted polynomials
// (-1)^(q+k) P_theta(x) = (-1)^(q'+k') P_theta'(x') and solve inside the
// image band, where the adjusted polynomial rises monotonically -4 -> +4.
// At the even-q touching point x = 0 the two touching bands map to two
// different image bands, so the map is double-valued there: it returns the
// right endpoint of the lower image band and the left endpoint of the upper
// one (a single point when those image bands touch).
inline MappedPoint map_point(const Similarity& s, const Rational& theta, double x,
                             SpectrumCache* cache = nullptr) {
    validate_similarity(s);
    const auto bs = spectrum_for(theta, cache);
    const Rational out = map_theta(s, theta);
    const auto bs2 = spectrum_for(out, cache);

    MappedPoint mp;
    mp.theta_out = out;

    if (theta.q % 2 == 0 && std::abs(x) <= kBandTol) {
        const i64 klo = map_band_index(s, theta, theta.q / 2);
        const i64 khi = map_band_index(s, theta, theta.q / 2 + 1);
        const double lo_end = bs2->bands[static_cast<std::size_t>(klo - 1)].second;
        const double hi_end = bs2->bands[static_cast<std::size_t>(khi - 1)].first;
        if (hi_end - lo_end <= kBandTol) {
            mp.points = {lo_end};
            mp.band_index_out = {klo};
        } else {
            mp.points = {lo_end, hi_end};
            mp.band_index_out = {klo, khi};
        }
        return mp;
    }

    const i64 k = locate_band(*bs, x);
    if (k == 0) throw std::invalid_argument("similarity: point not in the spectrum");
    const double sgn_in = (theta.q + k) % 2 == 0 ? 1.0 : -1.0;
    const double v = std::clamp(sgn_in * charpoly_eval(theta, x), -4.0, 4.0);

    const i64 kk = map_band_index(s, theta, k);
    const auto& band = bs2->bands[static_cast<std::size_t>(kk - 1)];
    mp.band_index_out = {kk};

    // Band endpoints correspond exactly; bisecting toward |v| = 4 would lose
    // half the working precision whenever the image edge is a tangency point.
    const auto& src = bs->bands[static_cast<std::size_t>(k - 1)];
    if (x - src.first <= kBandTol) {
        mp.points = {band.first};
        return mp;
    }
    if (src.second - x <= kBandTol) {
        mp.points = {band.second};
        return mp;
    }

    const double sgn_out = (out.q + kk) % 2 == 0 ? 1.0 : -1.0;
    double lo = band.first, hi = band.second;
    while (hi - lo > kRootTol) {
        const double m = 0.5 * (lo + hi);
        if (sgn_out * charpoly_eval(out, m) < v)
            lo = m;
        else
            hi = m;
    }
    mp.points = {0.5 * (lo + hi)};
    return mp;
}

namespace detail {

inline std::optional<i64> a_power(const ProjMat& m) {
    const auto [a, b, c, d] = pos_den_rep(m);
    if (a == 1 && b == 0 && d == 1 && c >= 0) return c;
    return std::nullopt;
}

inline std::optional<i64> bab_power(const ProjMat& m) {
    // B A^n B = [[1-n, n], [-n, n+1]] in the positive-denominator orientation.
    const auto [a, b, c, d] = pos_den_rep(m);
    if (b >= 0 && a == 1 - b && c == -b && d == b + 1) return b;
    return std::nullopt;
}

}  // namespace detail

// Composition restricted to the closed-form cases: either factor the
// identity, or both factors plus-signed powers of the lower generator, where
// offsets and powers add. Anything else must be checked pointwise.
inline Similarity compose(const Similarity& s1, const Similarity& s2) {
    validate_similarity(s1);
    validate_similarity(s2);
    const Similarity id{ProjMat::from(1, 0, 0, 1), 0, Sign::plus};
    if (s1 == id) return s2;
    if (s2 == id) return s1;
    const auto n1 = detail::a_power(s1.m);
    const auto n2 = detail::a_power(s2.m);
    if (n1 && n2 && s1.sign == Sign::plus && s2.sign == Sign::plus)
        return make_similarity(pow_a(checked_add(*n1, *n2)), checked_add(s1.r, s2.r), Sign::plus);
    throw std::invalid_argument("similarity: composition pattern without a closed form");
}

// Conjugation by the vertical flip V: V S_{A^n,r,+} V = S_{B A^n B, r, -},
// and back. Other patterns have no closed form here.
inline Similarity v_conjugate(const Similarity& s) {
    validate_similarity(s);
    if (s.sign == Sign::plus) {
        if (const auto n = detail::a_power(s.m))
            return make_similarity(mul(mul(gen_b(), pow_a(*n)), gen_b()), s.r, Sign::minus);
    } else {
        if (const auto n = detail::bab_power(s.m))
            return make_similarity(pow_a(*n), s.r, Sign::plus);
    }
    throw std::invalid_argument("similarity: conjugation pattern without a closed form");
}

// The three generating point maps: the horizontal flip H(x, theta) = (-x,
// theta), the vertical flip V = S_{B,0,+}, and the step map S = S_{A,0,+}.
enum class Generator : unsigned char { h, v, s };

inline Similarity generator_v() { return make_similarity(gen_b(), 0, Sign::plus); }
inline Similarity generator_s() { return make_similarity(gen_a(), 0, Sign::plus); }

inline MappedPoint apply_generator(Generator g, const Rational& theta, double x,
                                   SpectrumCache* cache = nullptr) {
    switch (g) {
        case Generator::h: {
            const auto bs = spectrum_for(theta, cache);
            const i64 k = locate_band(*bs, x);
            if (k == 0) throw std::invalid_argument("similarity: point not in the spectrum");
            return {theta, {x == 0.0 ? 0.0 : -x}, {theta.q + 1 - k}};
        }
        case Generator::v:
            return map_point(generator_v(), theta, x, cache);
        case Generator::s:
            return map_point(generator_s(), theta, x, cache);
    }
    throw std::logic_error("similarity: unknown generator");
}

}  // namespace butterfly
