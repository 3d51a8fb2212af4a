#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <butterfly/ids.hpp>
#include <butterfly/spectrum.hpp>

#include "oracles.hpp"

using namespace butterfly;

TEST_CASE("free operator distribution hits its exact anchors") {
    CHECK(ids_F(-4.0) == 0.0);
    CHECK(ids_F(4.0) == 1.0);
    CHECK(ids_F(-7.5) == 0.0);
    CHECK(ids_F(9.0) == 1.0);
    CHECK(std::abs(ids_F(0.0) - 0.5) <= 1e-8);
}

TEST_CASE("distribution function is monotone with unit range") {
    double prev = -1.0;
    for (int i = 0; i <= 320; ++i) {
        const double x = -4.0 + 8.0 * i / 320.0;
        const double f = ids_F(x);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(f >= prev - 1e-10);
        prev = f;
    }
    // central symmetry of the level sets: F(x) + F(-x) = 1
    for (const double x : {0.37, 1.0, 1.9, 2.72, 3.5, 3.97}) {
        CHECK(std::abs(ids_F(x) + ids_F(-x) - 1.0) <= 2e-8);
    }
}

TEST_CASE("quadrature matches a plain area count at x = 2") {
    constexpr int n = 2000;
    constexpr double pi = std::numbers::pi;
    long long inside = 0;
    for (int i = 0; i < n; ++i) {
        const double s = pi * (i + 0.5) / n;
        const double cs = 2.0 * std::cos(s);
        for (int j = 0; j < n; ++j) {
            const double t = pi * (j + 0.5) / n;
            if (cs + 2.0 * std::cos(t) < 2.0) ++inside;
        }
    }
    const double counted = static_cast<double>(inside) / (static_cast<double>(n) * n);
    const double f = ids_F(2.0);
    CHECK(f > 0.5);
    CHECK(f < 1.0);
    CHECK(std::abs(f - counted) <= 1e-3);
}

TEST_CASE("quadrature tolerance knob converges") {
    for (const double x : {-3.2, -1.0, 0.4, 2.0, 3.9}) {
        CHECK(std::abs(ids_F(x, 1e-8) - ids_F(x, 1e-12)) <= 2e-8);
    }
}

TEST_CASE("counting function pins at simple frequencies") {
    CHECK(std::abs(trace_below(Rational{1, 1}, 0.0) - 0.5) <= 1e-8);
    CHECK(std::abs(trace_below(Rational{1, 2}, 0.0) - 0.5) <= 1e-8);

    const BandSpectrum bs = band_edges(Rational{1, 3});
    const double gap_mid = 0.5 * (bs.bands[0].second + bs.bands[1].first);
    CHECK(trace_below(bs, gap_mid) == 1.0 / 3.0);

    CHECK(trace_below(bs, -4.0) == 0.0);
    CHECK(trace_below(bs, 4.0) == 1.0);
}

TEST_CASE("counting function is monotone, flat on gaps, continuous at edges") {
    for (const Rational theta : {Rational{1, 3}, Rational{2, 5}, Rational{3, 7}, Rational{1, 4},
                                 Rational{3, 8}}) {
        CAPTURE(theta.p, theta.q);
        const BandSpectrum bs = band_edges(theta);

        double prev = -1.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = -4.1 + 8.2 * i / 400.0;
            const double v = trace_below(bs, x);
            CHECK(v >= prev - 1e-10);
            prev = v;
        }

        for (i64 k = 1; k < theta.q; ++k) {
            const double lo = bs.bands[static_cast<std::size_t>(k - 1)].second;
            const double hi = bs.bands[static_cast<std::size_t>(k)].first;
            if (hi - lo > 1e-7) {
                const double expected = static_cast<double>(k) / static_cast<double>(theta.q);
                CHECK(trace_below(bs, 0.5 * (lo + hi)) == expected);
            }
        }

        for (const double e : bs.edges) {
            const double below = trace_below(bs, e - 1e-9);
            const double above = trace_below(bs, e + 1e-9);
            CHECK(std::abs(above - below) <= 1e-6);
        }
    }
}

TEST_CASE("counting function matches the Bloch grid eigenvalue count") {
    constexpr int grid = 64;
    constexpr double pi = std::numbers::pi;
    for (const Rational theta : {Rational{1, 3}, Rational{1, 4}, Rational{2, 5}, Rational{3, 7},
                                 Rational{5, 8}}) {
        CAPTURE(theta.p, theta.q);
        const BandSpectrum bs = band_edges(theta);

        // Reduced-zone sampling: the eigenvalue multiset depends on k only
        // through q*k mod 2pi, so a full-zone grid would collapse to
        // (grid/gcd(q,grid))^2 distinct phase pairs for even q.
        const double zone = 2.0 * pi / static_cast<double>(theta.q);
        std::vector<double> pooled;
        pooled.reserve(static_cast<std::size_t>(grid * grid * 2 * theta.q));
        for (int a = 0; a < grid; ++a) {
            const double k1 = zone * (a + 0.5) / grid;
            for (int b = 0; b < grid; ++b) {
                const double k2 = zone * (b + 0.5) / grid;
                const auto h = oracle::dense_h(theta, k1, k2);
                const auto ev = oracle::hermitian_eigenvalues(h, static_cast<int>(theta.q));
                pooled.insert(pooled.end(), ev.begin(), ev.end());
            }
        }
        std::sort(pooled.begin(), pooled.end());

        for (int i = 0; i < 20; ++i) {
            const double x = -3.9 + 7.8 * i / 19.0;
            const auto it = std::lower_bound(pooled.begin(), pooled.end(), x);
            const double counted = static_cast<double>(it - pooled.begin()) /
                                   static_cast<double>(pooled.size());
            CHECK(std::abs(trace_below(bs, x) - counted) <= 1e-3);
        }
    }
}

TEST_CASE("evaluator inversion returns the quantile") {
    const IDSEvaluator ev;
    CHECK(ev.invert(0.0) == -4.0);
    CHECK(ev.invert(1.0) == 4.0);
    CHECK(std::abs(ev.invert(0.5)) <= 1e-8);
    for (const double y : {0.05, 0.3, 0.62, 0.9}) {
        CHECK(std::abs(ids_F(ev.invert(y)) - y) <= 1e-8);
    }
}
