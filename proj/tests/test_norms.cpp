#include <doctest.h>

#include <cmath>

#include <random>

#include "blstab/norms.hpp"

using namespace blstab;

TEST_CASE("plain norms against closed forms") {
  HalfLineGrid grid(96);
  const CVec f = grid.sample([](double y) { return std::exp(-y); });
  CHECK(norm_l2(grid, f) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  const CVec zero = CVec::Zero(grid.size());
  CHECK(norm_l2(grid, zero) == 0.0);
  CHECK(norm_linf(grid, zero) == 0.0);
  CHECK(norm_pair(grid, zero, 1.0) == 0.0);
  CHECK_THROWS_AS(norm_l2(grid, CVec::Zero(10)), ShapeError);
}

TEST_CASE("homogeneity") {
  HalfLineGrid grid(64);
  const CVec f = grid.sample([](double y) { return (1.0 + y) * std::exp(-0.8 * y); });
  const Complex c(2.0, -1.0);
  CHECK(norm_l2(grid, (c * f).eval()) ==
        doctest::Approx(std::abs(c) * norm_l2(grid, f)).epsilon(1e-12));
  CHECK(norm_linf(grid, (c * f).eval()) ==
        doctest::Approx(std::abs(c) * norm_linf(grid, f)).epsilon(1e-12));
}

TEST_CASE("wall weight evaluation") {
  const WeightSpec w = WeightSpec::rho(100.0, 2.0 / 3.0, 0.05);
  CHECK(w.breakpoint == doctest::Approx(std::pow(1.0 / 0.05, -1.5)));
  CHECK(w(0.0) == 0.0);
  CHECK(w(w.breakpoint) == doctest::Approx(1.0));
  CHECK(w(2.0 * w.breakpoint) == 1.0);
  CHECK(w(0.5 * w.breakpoint) == doctest::Approx(0.5));
  const WeightSpec rl = WeightSpec::rho_lambda(64.0, 0.5);
  CHECK(rl.breakpoint == doctest::Approx(std::pow(4.0 * 0.5, -1.5)));
  CHECK(WeightSpec::unit()(3.0) == 1.0);
}

TEST_CASE("weighted norm against a piecewise closed form") {
  // rho with breakpoint 1: int_0^1 Y e^{-2Y} + int_1^inf e^{-2Y}
  HalfLineGrid grid(192);
  WeightSpec w;
  w.kind = WeightSpec::Kind::Rho;
  w.breakpoint = 1.0;
  w.slope = 1.0;
  const CVec f = grid.sample([](double y) { return std::exp(-y); });
  const double exact = (0.25 - 0.75 * std::exp(-2.0)) + 0.5 * std::exp(-2.0);
  CHECK(norm_weighted_l2(grid, f, w) ==
        doctest::Approx(std::sqrt(exact)).epsilon(2e-3));
}

TEST_CASE("sup norm with cubic refinement sees intra-node peaks") {
  HalfLineGrid grid(96);
  const CVec f = grid.sample([](double y) { return std::sin(3.0 * y) * std::exp(-y); });
  double dense = 0.0;
  for (int i = 0; i <= 40000; ++i) {
    const double y = 40.0 * i / 40000.0;
    dense = std::max(dense, std::abs(std::sin(3 * y) * std::exp(-y)));
  }
  CHECK(norm_linf(grid, f) == doctest::Approx(dense).epsilon(1e-4));
}

TEST_CASE("gevrey weight convention and norm") {
  GevreyNormParams p;
  p.d = 1.0;
  p.gamma = 2.0 / 3.0;
  p.bigk = 0.5;
  // weight (1+|n|^d) e^{K <n>^gamma}
  CHECK(gevrey_weight(2, p) ==
        doctest::Approx(3.0 * std::exp(0.5 * std::pow(5.0, 1.0 / 3.0))).epsilon(1e-12));
  CHECK(gevrey_weight(0, p) == doctest::Approx(std::exp(0.5)));
  CHECK(gevrey_norm({}, p) == 0.0);
  CHECK(gevrey_norm({{2, 1.0}}, p) == doctest::Approx(gevrey_weight(2, p)));
  CHECK(gevrey_norm({{0, 0.0}, {3, 0.0}}, p) == 0.0);

  // monotone in K and d
  GevreyNormParams p2 = p;
  p2.bigk = 0.7;
  GevreyNormParams p3 = p;
  p3.d = 2.0;
  const std::map<int, double> m{{1, 0.5}, {4, 0.25}};
  CHECK(gevrey_norm(m, p2) >= gevrey_norm(m, p));
  CHECK(gevrey_norm(m, p3) >= gevrey_norm(m, p));
}

TEST_CASE("interpolation inequality on a closed-form pair") {
  HalfLineGrid grid(96);
  const double alpha = 1.0;
  const CVec phi = grid.sample([](double y) { return y * std::exp(-y); });
  const CVec w = grid.sample([](double y) { return -2.0 * std::exp(-y); });
  const InterpolationReport rep =
      check_interpolation(grid, phi, w, WeightSpec::unit(), alpha);
  CHECK(rep.fitted_c > 0.0);
  CHECK(rep.fitted_c <= 4.0);
  // all pieces in closed form: pair-L2 = sqrt(1/2), |w|_rho = sqrt(2)
  CHECK(rep.term_a == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));
  CHECK(rep.term_l1 == doctest::Approx(0.0));

  const CVec zero = CVec::Zero(grid.size());
  const InterpolationReport triv =
      check_interpolation(grid, zero, zero, WeightSpec::unit(), alpha);
  CHECK(triv.lhs == 0.0);
  CHECK(triv.fitted_c == 0.0);

  CHECK_THROWS_AS(check_interpolation(grid, phi, (2.0 * w).eval(), WeightSpec::unit(), alpha),
                  ConsistencyError);
}

TEST_CASE("interpolation constant is stable under refinement") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  auto run = [&](int n, unsigned seed) {
    HalfLineGrid grid(n);
    std::mt19937_64 r2(seed);
    double worst = 0.0;
    for (int d = 0; d < 100; ++d) {
      double c0 = g(r2), c1 = g(r2), s = 0.7 + 0.1 * (d % 5);
      const CVec phi = grid.sample([&](double y) {
        return (c0 * y + c1 * y * y) * std::exp(-s * y);
      });
      const CVec w = grid.d2_apply(phi) - phi;
      const InterpolationReport rep =
          check_interpolation(grid, phi, w, WeightSpec::unit(), 1.0);
      worst = std::max(worst, rep.fitted_c);
    }
    return worst;
  };
  const double a = run(96, 9);
  const double b = run(192, 9);
  CHECK(std::abs(a - b) <= 0.1 * std::max(a, b));
}
