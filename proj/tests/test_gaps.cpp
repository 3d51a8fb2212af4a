#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

#include <butterfly/gaps.hpp>

using namespace butterfly;

namespace {

// direct enumeration over the canonical window; the label must be unique there
std::optional<GapLabel> enumerated_label(const Rational& th, i64 k) {
    std::optional<GapLabel> found;
    for (i64 t = -(th.q - 1) / 2; 2 * t <= th.q; ++t) {
        if (((t * th.p - k) % th.q) != 0) continue;
        const i64 s = (t * th.p - k) / th.q;
        REQUIRE(!found.has_value());
        found = GapLabel{s, t};
    }
    return found;
}

}  // namespace

TEST_CASE("gap labels hit the pinned values") {
    CHECK(label_gap(Rational{1, 3}, 1) == GapLabel{0, 1});
    CHECK(label_gap(Rational{1, 3}, 2) == GapLabel{-1, -1});
    CHECK(label_gap(Rational{1, 2}, 1) == GapLabel{0, 1});
    CHECK(label_gap(Rational{3, 8}, 4) == GapLabel{1, 4});

    CHECK_THROWS_AS(label_gap(Rational{0, 1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(label_gap(Rational{1, 3}, 0), std::invalid_argument);
    CHECK_THROWS_AS(label_gap(Rational{1, 3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(label_gap(Rational{1, 1}, 1), std::invalid_argument);
}

TEST_CASE("gap labels solve the Diophantine equation across the Farey table") {
    for (const Rational& th : farey(50)) {
        if (th.p == 0 || th.q == 1) continue;
        for (i64 k = 1; k <= th.q - 1; ++k) {
            const GapLabel g = label_gap(th, k);
            REQUIRE(g.t * th.p - g.s * th.q == k);
            REQUIRE(2 * g.t <= th.q);
            REQUIRE(2 * g.t > -th.q);
            REQUIRE(g.t != 0);
            if (g.t > 0) {
                REQUIRE(g.s >= 0);
                REQUIRE(g.s <= g.t - 1);
            } else {
                REQUIRE(g.s >= g.t);
                REQUIRE(g.s <= -1);
            }
        }
    }
}

TEST_CASE("gap labels agree with window enumeration") {
    for (const Rational& th : farey(12)) {
        if (th.p == 0 || th.q == 1) continue;
        for (i64 k = 1; k <= th.q - 1; ++k) {
            const auto expect = enumerated_label(th, k);
            REQUIRE(expect.has_value());
            REQUIRE(label_gap(th, k) == *expect);
        }
    }
}

TEST_CASE("label transport hits the pinned values") {
    const Similarity a2 = make_similarity(pow_a(2), 1, Sign::plus);
    const TransportedLabel tl = transport_label(a2, Rational{1, 3}, GapLabel{0, 1});
    CHECK(tl.raw == GapLabel{0, 2});
    CHECK(tl.canonical == GapLabel{0, 2});

    const Similarity ident = make_similarity(ProjMat::from(1, 0, 0, 1), 0, Sign::plus);
    CHECK(transport_label(ident, Rational{2, 5}, GapLabel{-1, -2}).canonical == GapLabel{-1, -2});
    CHECK(transport_label(ident, Rational{2, 5}, GapLabel{-1, -2}).raw == GapLabel{-1, -2});

    const Similarity flip = make_similarity(gen_b(), 0, Sign::plus);
    const TransportedLabel fl = transport_label(flip, Rational{1, 3}, GapLabel{0, 1});
    CHECK(fl.raw == GapLabel{-1, -1});
    CHECK(fl.canonical == GapLabel{-1, -1});

    // canonicalization is a genuine reduction here: raw t leaves the window
    const Similarity a4 = make_similarity(pow_a(4), 0, Sign::plus);
    const TransportedLabel deep = transport_label(a4, Rational{1, 3}, GapLabel{-1, -1});
    CHECK(deep.raw == GapLabel{-1, -5});
    CHECK(deep.canonical == GapLabel{0, 2});
    CHECK(label_gap(Rational{1, 7}, 2) == GapLabel{0, 2});
}

TEST_CASE("transported labels match direct labels of the image gaps") {
    const std::vector<ProjMat> mats = {
        gen_a(), pow_a(2), pow_a(4), gen_b(), mul(mul(gen_b(), pow_a(2)), gen_b()),
        ProjMat::from(1, 1, 2, 3)};
    for (const ProjMat& m : mats) {
        for (const Sign sign : {Sign::plus, Sign::minus}) {
            for (i64 r = 0; r <= r_max(m, sign); ++r) {
                const Similarity s = make_similarity(m, r, sign);
                for (const Rational& th : farey(12)) {
                    if (th.p == 0 || th.q == 1) continue;
                    const Rational out = map_theta(s, th);
                    for (i64 k = 1; k <= th.q - 1; ++k) {
                        const i64 kk = map_band_index(s, th, k);
                        CAPTURE(m.a, m.b, m.c, m.d, r, sign == Sign::plus, th.p, th.q, k, kk);
                        REQUIRE(map_band_index(s, th, k + 1) == kk + 1);
                        const TransportedLabel tl = transport_label(s, th, label_gap(th, k));
                        REQUIRE(tl.canonical == label_gap(out, kk));
                    }
                }
            }
        }
    }
}
