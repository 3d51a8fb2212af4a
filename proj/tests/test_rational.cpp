#include <catch2/catch_amalgamated.hpp>

#include "butterfly/rational.hpp"

#include "oracles.hpp"

using namespace butterfly;

TEST_CASE("reduce normalizes to lowest terms in [0, 1]") {
    CHECK(reduce(3, 6) == Rational{1, 2});
    CHECK(reduce(0, 7) == Rational{0, 1});
    CHECK(reduce(5, 5) == Rational{1, 1});
    CHECK(reduce(-2, -6) == Rational{1, 3});

    CHECK_THROWS_AS(reduce(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(reduce(-1, 3), std::invalid_argument);
    CHECK_THROWS_AS(reduce(4, 3), std::invalid_argument);
    CHECK_THROWS_AS(reduce(1, -2), std::invalid_argument);
}

TEST_CASE("ordering compares by value") {
    CHECK(Rational{1, 3} < Rational{1, 2});
    CHECK(!(Rational{1, 2} < Rational{1, 2}));
    CHECK(Rational{0, 1} < Rational{1, 1000000});
}

TEST_CASE("parse accepts p/q and bare integers") {
    CHECK(parse_rational("3/6") == Rational{1, 2});
    CHECK(parse_rational("1") == Rational{1, 1});
    CHECK(parse_rational("0/9") == Rational{0, 1});
    CHECK(to_string(parse_rational("10/25")) == "2/5");

    CHECK_THROWS_AS(parse_rational("x/2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/2/3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("7/3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("99999999999999999999999"), std::invalid_argument);
}

TEST_CASE("farey order 5 matches the classic list") {
    const std::vector<Rational> want = {{0, 1}, {1, 5}, {1, 4}, {1, 3}, {2, 5}, {1, 2},
                                        {3, 5}, {2, 3}, {3, 4}, {4, 5}, {1, 1}};
    CHECK(farey(5) == want);
}

TEST_CASE("farey agrees with the sieve oracle") {
    for (const i64 qmax : {1, 2, 3, 7, 13, 30}) {
        CAPTURE(qmax);
        CHECK(farey(qmax) == oracle::farey_sieve(qmax));
    }
    CHECK_THROWS_AS(farey(0), std::invalid_argument);
}
