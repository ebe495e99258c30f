#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thermorel/expression.hpp"

using thermorel::Expression;
using thermorel::ValidationError;
using thermorel::Vec3;

TEST_CASE("arithmetic and precedence") {
    CHECK(Expression::parse("1+2*3").eval({}) == doctest::Approx(7.0));
    CHECK(Expression::parse("(1+2)*3").eval({}) == doctest::Approx(9.0));
    CHECK(Expression::parse("2^3^2").eval({}) == doctest::Approx(512.0));  // right assoc
    CHECK(Expression::parse("-2^2").eval({}) == doctest::Approx(-4.0));
    CHECK(Expression::parse("6/4").eval({}) == doctest::Approx(1.5));
    CHECK(Expression::parse("1 - 2 - 3").eval({}) == doctest::Approx(-4.0));
}

TEST_CASE("variables and functions") {
    const Vec3 p{0.5, -1.25, 2.0};
    CHECK(Expression::parse("x").eval(p) == doctest::Approx(0.5));
    CHECK(Expression::parse("y").eval(p) == doctest::Approx(-1.25));
    CHECK(Expression::parse("z").eval(p) == doctest::Approx(2.0));
    CHECK(Expression::parse("sin(pi/2)").eval(p) == doctest::Approx(1.0));
    CHECK(Expression::parse("sqrt(x^2+y^2)").eval(p) ==
          doctest::Approx(std::hypot(0.5, -1.25)));
    CHECK(Expression::parse("exp(0)+cos(0)").eval(p) == doctest::Approx(2.0));
    CHECK(Expression::parse("abs(-3)").eval(p) == doctest::Approx(3.0));
    CHECK(Expression::parse("300+100*exp(-((x-1)^2+y^2)/0.3)").eval({1.0, 0.0, 0.0}) ==
          doctest::Approx(400.0));
}

TEST_CASE("errors carry a column position") {
    CHECK_THROWS_AS(Expression::parse("1+"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("sin(1"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("foo(1)"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("1 2"), ValidationError);
    CHECK_THROWS_AS(Expression::parse(""), ValidationError);
    try {
        Expression::parse("1+*2");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
}

TEST_CASE("re-entrant evaluation") {
    const Expression e = Expression::parse("x*y");
    CHECK(e.eval({2, 3, 0}) == doctest::Approx(6.0));
    CHECK(e.eval({4, 5, 0}) == doctest::Approx(20.0));
    CHECK(e.source() == "x*y");
}
