#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "salnet/format.hpp"
#include "salnet/rng.hpp"

using namespace salnet;

TEST_CASE("shortest formatting round-trips bit for bit") {
    Rng rng(21);
    for (int i = 0; i < 20000; ++i) {
        const double v = std::bit_cast<double>(rng.next_u64());
        if (!std::isfinite(v)) continue;
        const double back = parse_double(format_double(v));
        REQUIRE(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2e-5) == "2e-05");
    CHECK(format_double(-0.0) == "-0");
}

TEST_CASE("non-finite values") {
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(std::isnan(parse_double("nan")));
    CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
}

TEST_CASE("parse rejects partial numbers") {
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
    CHECK(parse_double("1e3") == 1000.0);
}
