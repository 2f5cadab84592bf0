#include <doctest.h>

#include <cmath>

#include "robin/expr.hpp"

using namespace robin;

TEST_CASE("expression parse and eval") {
  const Expr e = Expr::parse("1 + x1*x2 - x1^2 / 2");
  CHECK(e.eval({2, 3, 0}) == doctest::Approx(1 + 6 - 2).epsilon(1e-15));
  CHECK(Expr::parse("exp(0)").eval({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(Expr::parse("sin(pi/2)").eval({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(Expr::parse("-x1 + 2e-1").eval({0.5, 0, 0}) == doctest::Approx(-0.3));
  CHECK(Expr::parse("2^3^1").eval({0, 0, 0}) == doctest::Approx(8.0));
}

TEST_CASE("expression parse errors") {
  CHECK_THROWS(Expr::parse("x4"));
  CHECK_THROWS(Expr::parse("1 +"));
  CHECK_THROWS(Expr::parse("sin 1"));
  CHECK_THROWS(Expr::parse("(1"));
}

TEST_CASE("symbolic differentiation") {
  const Expr u = Expr::parse("1 + x1^2 * x2 + exp(2*x1)");
  const Expr du1 = u.diff(0);
  const Expr du2 = u.diff(1);
  const Vec3 x{0.7, -1.3, 0};
  CHECK(du1.eval(x) == doctest::Approx(2 * x[0] * x[1] + 2 * std::exp(2 * x[0])).epsilon(1e-13));
  CHECK(du2.eval(x) == doctest::Approx(x[0] * x[0]).epsilon(1e-13));
  CHECK(u.diff(0).diff(0).eval(x) ==
        doctest::Approx(2 * x[1] + 4 * std::exp(2 * x[0])).epsilon(1e-13));
  CHECK(Expr::parse("cos(x1)").diff(0).eval(x) == doctest::Approx(-std::sin(x[0])));
}

TEST_CASE("constant detection and folding") {
  double c = 0;
  CHECK(Expr::parse("2*3 + 1").is_constant(&c));
  CHECK(c == doctest::Approx(7.0));
  CHECK_FALSE(Expr::parse("x1").is_constant());
  CHECK(Expr::parse("x1").diff(1).is_constant(&c));
  CHECK(c == 0.0);
}
