#include <doctest.h>

#include <cmath>

#include "blstab/grid.hpp"

using namespace blstab;

TEST_CASE("derivative of a constant vanishes") {
  for (int n : {64, 128}) {
    HalfLineGrid grid(n);
    Vec ones = Vec::Ones(n);
    CHECK((grid.d1() * ones).cwiseAbs().maxCoeff() < 1e-10 * n);
  }
}

TEST_CASE("derivative and quadrature of exponentials") {
  for (int n : {64, 96, 128}) {
    HalfLineGrid grid(n);
    const CVec f = grid.sample([](double y) { return std::exp(-y); });
    const CVec df = grid.d1_apply(f);
    CHECK((df + f).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(grid.integrate(grid.sample([](double y) { return std::exp(-2 * y); })).real() ==
          doctest::Approx(0.5).epsilon(1e-8));
  }
}

TEST_CASE("second derivative composes with the first") {
  HalfLineGrid grid(96);
  const CVec f = grid.sample([](double y) { return y * std::exp(-y); });
  const CVec a = grid.d2_apply(f);
  const CVec b = grid.d1_apply(grid.d1_apply(f));
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("grid structure") {
  HalfLineGrid grid(64);
  CHECK(grid.nodes()[0] == 0.0);
  CHECK(grid.nodes()[63] == doctest::Approx(40.0));
  for (int j = 1; j < 64; ++j) CHECK(grid.nodes()[j] > grid.nodes()[j - 1]);
  for (int j = 0; j < 64; ++j) CHECK(grid.quad_weights()[j] > 0.0);
  CHECK(grid.d2_condition() > 1.0);
  CHECK(grid.nodes_below(2.0) >= 30); // half the nodes sit under y_half
}

TEST_CASE("truncated chebyshev mapping") {
  GridParams gp;
  gp.mapping = GridMapping::TruncatedChebyshev;
  gp.length = 30.0;
  HalfLineGrid grid(96, gp);
  const CVec f = grid.sample([](double y) { return std::exp(-y); });
  CHECK((grid.d1_apply(f) + f).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(grid.integrate(grid.sample([](double y) { return std::exp(-2 * y); })).real() ==
        doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("refinement leaves closed-form norms fixed") {
  HalfLineGrid g1(96), g2(192);
  const auto q = [](const HalfLineGrid& g) {
    return g.integrate(g.sample([](double y) { return std::exp(-2 * y); })).real();
  };
  CHECK(std::abs(q(g1) - q(g2)) < 1e-8);
}

TEST_CASE("interpolation reproduces grid data and midpoints") {
  HalfLineGrid grid(96);
  const CVec f = grid.sample([](double y) { return std::exp(-0.7 * y); });
  CHECK(std::abs(grid.interpolate(f, grid.nodes()[10]) - f[10]) < 1e-13);
  CHECK(std::abs(grid.interpolate(f, 1.234) - std::exp(-0.7 * 1.234)) < 1e-10);
}

TEST_CASE("bad parameters are config errors") {
  CHECK_THROWS_AS(HalfLineGrid(8), ConfigError);
  GridParams gp;
  gp.y_half = -1.0;
  CHECK_THROWS_AS(HalfLineGrid(64, gp), ConfigError);
  gp.y_half = 30.0;
  gp.length = 40.0;
  CHECK_THROWS_AS(HalfLineGrid(64, gp), ConfigError);
}
