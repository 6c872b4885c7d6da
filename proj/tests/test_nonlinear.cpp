#include <doctest.h>

#include <cmath>
#include <random>

#include "blstab/nonlinear.hpp"
#include "blstab/resolvent.hpp"

using namespace blstab;

namespace {

HalfLineGrid sim_grid(int n = 64) {
  GridParams gp;
  gp.y_half = 1.0;
  return HalfLineGrid(n, gp);
}

SimState empty_state(const HalfLineGrid& grid, double nu, int n_max) {
  SimState st;
  st.nu = nu;
  st.mean_v1 = CVec::Zero(grid.size());
  st.psi.assign(n_max, CVec::Zero(grid.size()));
  return st;
}

} // namespace

TEST_CASE("z-norm parameter bookkeeping") {
  const ZNormParams zp = ZNormParams::make(0.75, 0.5, 1.0, 5.0 - 2.25 + 0.5, 0.5);
  CHECK(zp.q == doctest::Approx(3.25 - 0.75 - 1.0));
  CHECK(zp.t_max() == doctest::Approx(0.125));
  CHECK(zp.k_of_t(0.1) == doctest::Approx(0.5 - 0.4));
  CHECK_THROWS_AS(ZNormParams::make(0.75, 0.5, 1.0, 1.0, 0.5), ConfigError);

  CHECK(beta_exponent(0.75) ==
        doctest::Approx(7.0 * 0.25 / 6.0 + 1.0 / 6.0 + 1e-3).epsilon(1e-12));
  // at gamma -> 1 the second branch dominates
  CHECK(beta_exponent(1.0) == doctest::Approx(3.0 / 16.0 + 0.125 / 1000 * 8).epsilon(0.1));
}

TEST_CASE("parallel shear state has no nonlinear feedback") {
  const HalfLineGrid grid = sim_grid();
  SimState st = empty_state(grid, 1e-2, 4);
  st.mean_v1 = grid.sample([](double y) { return y * std::exp(-y); });
  const NonlinearTerm nt = nonlinear_term(st, grid);
  for (int n = 0; n <= 4; ++n) {
    double mag = 0.0;
    for (int j = 0; j < grid.size(); ++j)
      mag = std::max({mag, std::abs(nt.projected[n].v1[j]),
                      std::abs(nt.projected[n].v2[j])});
    CHECK(mag < 1e-14);
  }
}

TEST_CASE("two-mode convolution matches a hand-assembled oracle") {
  const HalfLineGrid grid = sim_grid();
  const double nu = 1e-2;
  SimState st = empty_state(grid, nu, 4);
  std::mt19937_64 rng(3);
  st.psi[0] = random_decaying(grid, rng, 2);
  st.psi[1] = random_decaying(grid, rng, 2);
  const NonlinearTerm nt = nonlinear_term(st, grid);

  // output mode 3 takes contributions from (j,k) = (1,2) and (2,1) only
  auto vel = [&](int n) { return st.mode_velocity(grid, n); };
  const VelocityMode u1 = vel(1), u2 = vel(2);
  const Complex ib1(0.0, 1.0 * std::sqrt(nu));
  const Complex ib2(0.0, 2.0 * std::sqrt(nu));
  const Complex ib3(0.0, 3.0 * std::sqrt(nu));
  CVec g1(grid.size()), g2(grid.size());
  const CVec du2_1 = grid.d1_apply(u2.v1), du2_2 = grid.d1_apply(u2.v2);
  const CVec du1_1 = grid.d1_apply(u1.v1), du1_2 = grid.d1_apply(u1.v2);
  for (int j = 0; j < grid.size(); ++j) {
    g1[j] = u1.v1[j] * (ib2 * u2.v1[j]) + u1.v2[j] * du2_1[j] +
            u2.v1[j] * (ib1 * u1.v1[j]) + u2.v2[j] * du1_1[j];
    g2[j] = u1.v1[j] * (ib2 * u2.v2[j]) + u1.v2[j] * du2_2[j] +
            u2.v1[j] * (ib1 * u1.v2[j]) + u2.v2[j] * du1_2[j];
  }
  const CVec curl3 = ib3 * g2 - grid.d1_apply(g1);
  CHECK(norm_l2(grid, (curl3 - nt.curl[2]).eval()) <
        1e-12 * std::max(1.0, norm_l2(grid, curl3)));
}

TEST_CASE("leray projection is idempotent") {
  const HalfLineGrid grid = sim_grid();
  SimState st = empty_state(grid, 1e-2, 3);
  std::mt19937_64 rng(5);
  for (auto& p : st.psi) p = random_decaying(grid, rng, 2);
  const NonlinearTerm nt = nonlinear_term(st, grid);
  const int n = 2;
  const double bn = n * std::sqrt(st.nu);
  const VelocityMode once = nt.projected[n];
  const VelocityMode twice = leray_project(grid, bn, once);
  double diff = 0.0, scale = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    diff += grid.quad_weights()[j] *
            (std::norm(twice.v1[j] - once.v1[j]) + std::norm(twice.v2[j] - once.v2[j]));
    scale += grid.quad_weights()[j] * (std::norm(once.v1[j]) + std::norm(once.v2[j]));
  }
  CHECK(std::sqrt(diff) <= 1e-12 * std::max(1e-12, std::sqrt(scale)));
}

TEST_CASE("divergence-free and reality are built into the representation") {
  const HalfLineGrid grid = sim_grid();
  SimState st = empty_state(grid, 1e-2, 3);
  std::mt19937_64 rng(7);
  for (auto& p : st.psi) p = random_decaying(grid, rng, 2);
  for (int n = 1; n <= 3; ++n) {
    const VelocityMode plus = st.mode_velocity(grid, n);
    const VelocityMode minus = st.mode_velocity(grid, -n);
    const Complex ibn(0.0, n * std::sqrt(st.nu));
    const CVec div = ibn * plus.v1 + grid.d1_apply(plus.v2);
    CHECK(norm_l2(grid, div) < 1e-8 * std::max(1.0, norm_l2(grid, plus.v1)));
    for (int j = 0; j < grid.size(); ++j) {
      CHECK(minus.v1[j] == std::conj(plus.v1[j]));
      CHECK(minus.v2[j] == std::conj(plus.v2[j]));
    }
  }
}

TEST_CASE("convolution bound reports") {
  const HalfLineGrid grid = sim_grid();
  const ZNormParams zp = ZNormParams::make(0.75, 0.5, 1.0, 3.25, 0.5);

  SUBCASE("zero state gives zero ratios") {
    const SimState st = empty_state(grid, 1e-2, 4);
    const EstimateReport r = check_convolution_bound(st, grid, zp, 0.05);
    CHECK(r.ratio == 0.0);
  }

  SUBCASE("single-mode ratio is unchanged by enlarging the band") {
    std::mt19937_64 rng(9);
    const CVec shape = random_decaying(grid, rng, 2);
    SimState small = empty_state(grid, 1e-2, 4);
    small.psi[0] = shape;
    SimState big = empty_state(grid, 1e-2, 8);
    big.psi[0] = shape;
    const double r1 = check_convolution_bound(small, grid, zp, 0.05).ratio;
    const double r2 = check_convolution_bound(big, grid, zp, 0.05).ratio;
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
  }

  SUBCASE("sup ratio is stable under band doubling for gevrey data") {
    auto make = [&](int nmax) {
      SimState st = empty_state(grid, 1e-2, nmax);
      std::mt19937_64 rng(11);
      for (int n = 1; n <= nmax; ++n) {
        const CVec shape = random_decaying(grid, rng, 2);
        st.psi[n - 1] =
            std::exp(-zp.bigk * std::pow(1.0 + n * n, zp.gamma / 2.0)) /
            (1.0 + std::pow(n, zp.d)) * shape;
      }
      return st;
    };
    // identical seeds give identical low modes; higher band adds tiny tails
    const double r1 = check_convolution_bound(make(8), grid, zp, 0.05).ratio;
    const double r2 = check_convolution_bound(make(16), grid, zp, 0.05).ratio;
    CHECK(std::abs(r1 - r2) <= 0.1 * std::max(r1, r2));
  }

  SUBCASE("sup ratio is invariant under modal phase rotation") {
    SimState st = empty_state(grid, 1e-2, 4);
    std::mt19937_64 rng(13);
    for (auto& p : st.psi) p = random_decaying(grid, rng, 2);
    SimState rot = st;
    const double theta0 = 0.83;
    for (int n = 1; n <= 4; ++n)
      rot.psi[n - 1] *= std::polar(1.0, n * theta0);
    const double r1 = check_convolution_bound(st, grid, zp, 0.05).ratio;
    const double r2 = check_convolution_bound(rot, grid, zp, 0.05).ratio;
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));
  }
}

TEST_CASE("simulation basics") {
  const ShearProfile prof = make_builtin_profile("exp");
  const HalfLineGrid grid = sim_grid(64);
  const ZNormParams zp = ZNormParams::make(0.75, 0.5, 1.0, 3.25, 0.5);

  SUBCASE("rest stays at rest") {
    SimState a = empty_state(grid, 1e-2, 4);
    const SimResult res = simulate(prof, a, zp, grid);
    CHECK(res.stable);
    CHECK(res.history.back().z_norm == 0.0);
  }

  SUBCASE("small data stays bounded and the energy ledger holds") {
    const double nu = 1e-2;
    const double amp = 1e-2 * std::pow(nu, 0.5 + zp.beta);
    SimState a = gevrey_initial_data(grid, nu, 8, 3, zp, amp, 17);
    CHECK(x1_norm(a, grid, zp) == doctest::Approx(amp).epsilon(1e-10));
    SimOptions opts;
    opts.save_every = 4;
    const SimResult res = simulate(prof, a, zp, grid, opts);
    CHECK(res.stable);
    REQUIRE(res.history.size() >= 3);
    const double c_fit = res.history.back().z_norm / res.a_x1_norm;
    CHECK(std::isfinite(c_fit));
    CHECK(c_fit > 0.0);
    CHECK(res.history.back().t == doctest::Approx(zp.t_max()).epsilon(1e-9));

    // energy inequality between consecutive saves
    const double envelope = 2.0 * (1.0 / std::exp(1.0)) * 8;
    for (std::size_t k = 1; k < res.history.size(); ++k) {
      const auto& h0 = res.history[k - 1];
      const auto& h1 = res.history[k];
      const double dt = h1.t - h0.t;
      if (dt <= 0) continue;
      const double lhs = (h1.l2 * h1.l2 - h0.l2 * h0.l2) / dt;
      const double rhs = envelope * std::max(h0.l2 * h0.l2, h1.l2 * h1.l2) -
                         2.0 * nu * std::min(h0.grad_l2 * h0.grad_l2,
                                             h1.grad_l2 * h1.grad_l2);
      CHECK(lhs <= rhs + 1e-6 * std::max(1.0, std::abs(rhs)));
    }
  }

  SUBCASE("k(t) decreases along the history") {
    CHECK(zp.k_of_t(0.0) > zp.k_of_t(0.05));
    CHECK(zp.k_of_t(zp.t_max()) >= 0.0);
  }
}

TEST_CASE("tiny amplitude evolution matches the mode-wise linear path") {
  const ShearProfile prof = make_builtin_profile("exp");
  const HalfLineGrid grid = sim_grid(64);
  const ZNormParams zp = ZNormParams::make(0.75, 0.5, 0.05, 3.25, 0.5);
  const double nu = 1e-2;
  const double amp = 1e-8 * std::pow(nu, 0.5 + zp.beta);
  SimState a = gevrey_initial_data(grid, nu, 4, 2, zp, amp, 19);
  SimOptions opts;
  opts.dt_user = 2e-3;
  const SimResult nl = simulate(prof, a, zp, grid, opts);

  const double t_end = nl.history.back().t;
  const double tau_end = t_end / std::sqrt(nu);
  const DeltaFamily d = DeltaFamily::defaults(prof);
  double num = 0.0, den = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const ModeContext ctx =
        ModeContext::from_mu(prof, nu, n, {1.0, 0.0}, zp.gamma, zp.delta, d);
    ModeEvolution evo(prof, ctx, grid);
    const int nsteps = static_cast<int>(std::lround(tau_end / (opts.dt_user /
                       std::sqrt(nu)) * std::sqrt(nu) / std::sqrt(nu)));
    const CVec lin = evo.apply_timestep(a.psi[n - 1], tau_end,
                                        std::max(400, nsteps));
    num += std::pow(norm_pair(grid, (lin - nl.final_state.psi[n - 1]).eval(), ctx.alpha), 2);
    den += std::pow(norm_pair(grid, lin, ctx.alpha), 2);
  }
  CHECK(std::sqrt(num / den) < 1e-4);
}
