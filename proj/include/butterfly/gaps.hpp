#pragma once

// Integer labels for spectral gaps and their transport under similarity maps.
//
// The k-th gap of the spectrum at p/q carries the unique label (s, t) with
//   k = t*p - s*q,  t in (-q/2, q/2],
// the quantum-Hall Diophantine equation. A similarity shifts gap indices by a
// fixed stride, which acts on labels as an affine integer map.

#include <stdexcept>

#include <butterfly/similarity.hpp>

namespace butterfly {

struct GapLabel {
    i64 s{0};
    i64 t{0};
    friend bool operator==(const GapLabel&, const GapLabel&) = default;
};

namespace detail {

// inverse of p modulo q for coprime inputs
inline i64 mod_inverse(i64 p, i64 q) {
    i64 old_r = p % q, r = q;
    i64 old_x = 1, x = 0;
    while (r != 0) {
        const i64 quo = old_r / r;
        old_r -= quo * r;
        std::swap(old_r, r);
        old_x -= quo * x;
        std::swap(old_x, x);
    }
    if (old_r != 1 && old_r != -1) throw std::logic_error("gap label: inputs not coprime");
    if (old_r == -1) old_x = -old_x;
    return ((old_x % q) + q) % q;
}

// shift t into (-q/2, q/2] by multiples of q, adjusting s to keep t*p - s*q
inline GapLabel canonical_label(GapLabel g, const Rational& theta) {
    const i64 q = theta.q;
    i64 t = ((g.t % q) + q) % q;
    if (2 * t > q) t -= q;
    const i64 m = (t - g.t) / q;
    return GapLabel{g.s + m * theta.p, t};
}

}  // namespace detail

// label of the k-th gap (between bands k and k+1); the zero-width touching
// gap at k = q/2 for even q is labeled like any other index
inline GapLabel label_gap(const Rational& theta, i64 k) {
    if (theta.p == 0) throw std::invalid_argument("gap label: zero frequency has no gaps");
    if (k < 1 || k > theta.q - 1) throw std::invalid_argument("gap label: index out of range");
    const i64 q = theta.q;
    i64 t = (k % q) * detail::mod_inverse(theta.p, q) % q;
    if (2 * t > q) t -= q;
    const i64 s = (t * theta.p - k) / q;
    if (t * theta.p - s * q != k) throw std::logic_error("gap label: equation violated");
    return GapLabel{s, t};
}

struct TransportedLabel {
    GapLabel raw;
    GapLabel canonical;
};

// affine index transport: gap k at theta maps to gap r*stride + k at the
// image fraction, which on labels is det(M) * M * (s,t) plus an offset of
// (0, r) for the plus family and (-r, -r) for the minus family
inline TransportedLabel transport_label(const Similarity& sim, const Rational& theta,
                                        const GapLabel& g) {
    validate_similarity(sim);
    const auto [a, b, c, d] = pos_den_rep(sim.m);
    const i64 det = a * d - b * c;
    GapLabel raw{
        checked_mul(det, checked_add(checked_mul(a, g.s), checked_mul(b, g.t))),
        checked_mul(det, checked_add(checked_mul(c, g.s), checked_mul(d, g.t)))};
    if (sim.sign == Sign::plus) {
        raw.t += sim.r;
    } else {
        raw.s -= sim.r;
        raw.t -= sim.r;
    }
    return TransportedLabel{raw, detail::canonical_label(raw, map_theta(sim, theta))};
}

}  // namespace butterfly
