#include <doctest.h>

#include <cmath>
#include <random>

#include <map>

#include "blstab/resolvent.hpp"

using namespace blstab;

namespace {

HalfLineGrid solver_grid(int n) {
  GridParams gp;
  gp.y_half = 1.0;
  return HalfLineGrid(n, gp);
}

ModeContext line_ctx(const ShearProfile& prof, double nu, int n, double gamma,
                     double delta, double lam_r = 0.3) {
  const DeltaFamily d = DeltaFamily::defaults(prof);
  const double li = std::pow(std::abs(n), gamma - 1.0) / delta;
  return ModeContext::from_lambda(prof, nu, n, {lam_r, li}, gamma, delta, d);
}

} // namespace

TEST_CASE("frequency regime classification") {
  const ShearProfile prof = make_builtin_profile("exp");
  // delta0 ~= 0.1118: thresholds 8.94 and 8.94 nu^{-3/4}
  CHECK(classify(prof, 1e-4, 1, 2.0 / 3.0) == FrequencyRegime::Low);
  CHECK(classify(prof, 1e-4, 8, 2.0 / 3.0) == FrequencyRegime::Low);
  CHECK(classify(prof, 1e-4, 100, 2.0 / 3.0) == FrequencyRegime::MiddleSmall);
  // 100^{2/3} * 0.01 = 0.215 < 1 so middle-small; push gamma up for middle-large
  CHECK(classify(prof, 1e-4, 5000, 1.0) == FrequencyRegime::MiddleLarge);
  CHECK(classify(prof, 1e-4, 1000000, 2.0 / 3.0) == FrequencyRegime::High);
  CHECK_THROWS_AS(classify(prof, -1e-4, 10, 2.0 / 3.0), ConfigError);
}

TEST_CASE("resolvent region membership") {
  const ShearProfile prof = make_builtin_profile("exp");
  const DeltaFamily d = DeltaFamily::defaults(prof);
  const double theta = M_PI / 2 + 0.1;
  const double nu = 1e-4;
  const int n = 100;

  // mu = 0 sits in no region
  ModeContext zero = ModeContext::from_mu(prof, nu, n, {0.0, 0.0}, 2.0 / 3.0, 0.05, d);
  CHECK(in_resolvent_region(zero, theta).empty());

  // boundary of the disc-line region belongs to it (closed convention)
  const double re_line = std::sqrt(nu) * std::pow(n, 2.0 / 3.0) / 0.05;
  ModeContext on_line =
      ModeContext::from_mu(prof, nu, n, {re_line, 0.0}, 2.0 / 3.0, 0.05, d);
  const auto tags = in_resolvent_region(on_line, theta);
  CHECK(std::count(tags.begin(), tags.end(), "O-disc-line") == 1);

  // large Re mu lands in the energy region
  ModeContext big = ModeContext::from_mu(prof, nu, n, {2.0 / d.delta2, 0.0}, 2.0 / 3.0,
                                         0.05, d);
  const auto tags2 = in_resolvent_region(big, theta);
  CHECK(std::count(tags2.begin(), tags2.end(), "Im-large") == 1);

  // far up the imaginary axis lies in the sector
  ModeContext sec = ModeContext::from_mu(prof, nu, n, {0.0, 400.0}, 2.0 / 3.0, 0.05, d);
  const auto tags3 = in_resolvent_region(sec, theta);
  CHECK(std::count(tags3.begin(), tags3.end(), "S-sector") == 1);

  CHECK_THROWS_AS(in_resolvent_region(zero, 0.3), ConfigError);
}

TEST_CASE("operator norm from the svd agrees with randomized probing") {
  const ShearProfile prof = make_builtin_profile("exp");
  const HalfLineGrid grid = solver_grid(48);
  const ModeContext ctx = line_ctx(prof, 1e-3, 20, 2.0 / 3.0, 0.05);
  std::mt19937_64 rng(3);
  for (auto kind : {ResolventNormKind::L2ToL2, ResolventNormKind::L2ToWeightedCurl}) {
    const double svd = resolvent_norm(prof, ctx, grid, kind);
    const double probe = resolvent_norm_randomized(prof, ctx, grid, kind, 5, rng);
    CHECK(probe <= svd * (1.0 + 1e-9));
    CHECK(probe >= 0.005 * svd);
  }
}

TEST_CASE("deep in the energy region the norm scales like 1/Re mu") {
  const ShearProfile prof = make_builtin_profile("exp");
  const DeltaFamily d = DeltaFamily::defaults(prof);
  const double nu = 1e-3;
  const int n = 20;
  const double re = 10.0 / d.delta2;
  const ModeContext ctx =
      ModeContext::from_mu(prof, nu, n, {re, 0.0}, 2.0 / 3.0, 0.05, d);
  const double n64 = resolvent_norm(prof, ctx, solver_grid(64), ResolventNormKind::L2ToL2);
  const double n128 =
      resolvent_norm(prof, ctx, solver_grid(128), ResolventNormKind::L2ToL2);
  CHECK(n64 * re < 10.0);              // fitted constant stays moderate
  CHECK(std::abs(n64 - n128) < 0.1 * n64); // stable on the solenoidal space

  // gradient norm along a ray stays bounded after the nu^{1/4}(Re mu)^{1/2} scaling
  double worst = 0.0;
  for (double f : {1.0, 4.0, 16.0, 100.0}) {
    const ModeContext c2 =
        ModeContext::from_mu(prof, nu, n, {f / d.delta2, 0.0}, 2.0 / 3.0, 0.05, d);
    const double g =
        resolvent_norm(prof, c2, solver_grid(64), ResolventNormKind::L2ToGradient);
    worst = std::max(worst, g * std::pow(nu, 0.25) * std::sqrt(f / d.delta2));
  }
  CHECK(worst < 30.0);
}

TEST_CASE("conjugation symmetry in the mode number") {
  const ShearProfile prof = make_builtin_profile("exp");
  const HalfLineGrid grid = solver_grid(48);
  const DeltaFamily d = DeltaFamily::defaults(prof);
  const double re = 10.0 / d.delta2;
  const ModeContext plus =
      ModeContext::from_mu(prof, 1e-3, 20, {re, 0.0}, 2.0 / 3.0, 0.05, d);
  const ModeContext minus =
      ModeContext::from_mu(prof, 1e-3, -20, {re, 0.0}, 2.0 / 3.0, 0.05, d);
  const double a = resolvent_norm(prof, plus, grid, ResolventNormKind::L2ToL2);
  const double b = resolvent_norm(prof, minus, grid, ResolventNormKind::L2ToL2);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("inequality sweep machinery") {
  const ShearProfile prof = make_builtin_profile("exp");
  const HalfLineGrid grid = solver_grid(96);

  SUBCASE("empty sweep gives an empty report list") {
    const SweepResult r = verify_inequality("lambda-large-L2", prof, {}, grid);
    CHECK(r.reports.empty());
    CHECK(r.summary.count == 0);
  }

  SUBCASE("hypothesis violations are rejected with the clause named") {
    // admissible line point but |lambda| below the large-lambda threshold
    const DeltaFamily d = DeltaFamily::defaults(prof);
    const ModeContext small = line_ctx(prof, 1e-4, 100, 2.0 / 3.0, d.delta1);
    const SweepResult r = verify_inequality("lambda-large-L2", prof, {small}, grid);
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].clause.find("lambda") != std::string::npos);
  }

  SUBCASE("unknown id is a config error") {
    CHECK_THROWS_AS(verify_inequality("no-such-display", prof, {}, grid), ConfigError);
  }

  SUBCASE("large-lambda ratios stay within a factor two of each other") {
    // the delta family is configuration; open the sector so |lambda| = 20
    // clears the large-lambda threshold
    DeltaFamily d = DeltaFamily::defaults(prof);
    d.delta1 = 0.06;
    std::vector<ModeContext> sweep;
    for (double li : {40.0, 80.0, 160.0})
      sweep.push_back(
          ModeContext::from_lambda(prof, 1e-4, 100, {0.0, li}, 2.0 / 3.0, 0.05, d));
    const SweepResult r = verify_inequality("lambda-large-L2", prof, sweep, grid, 5, 7);
    REQUIRE(r.rejected.empty());
    // per-point ratio is the max over draws; those cluster across the sweep
    std::map<double, double> per_lambda;
    for (const auto& rep : r.reports) {
      double& v = per_lambda[rep.lambda.imag()];
      v = std::max(v, rep.ratio);
    }
    REQUIRE(per_lambda.size() == 3);
    double lo = 1e300, hi = 0.0;
    for (const auto& [li, v] : per_lambda) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi <= 2.0 * lo);
    CHECK(std::isfinite(r.summary.sup_ratio));
  }

  SUBCASE("rayleigh trick gap is nonnegative") {
    const ModeContext ctx = line_ctx(prof, 1e-4, 100, 2.0 / 3.0, 0.05);
    const SweepResult r = verify_inequality("rayleigh-trick-first", prof, {ctx}, grid, 20, 11);
    REQUIRE(!r.reports.empty());
    for (const auto& rep : r.reports) {
      CHECK(rep.lhs <= rep.rhs_shape + 1e-8);
    }
  }

  SUBCASE("shrinking delta filters the sweep, never raising the sup ratio") {
    // fixed sweep points; a smaller delta only strengthens the admissibility
    // filter, so the sup runs over a subset
    const DeltaFamily d = DeltaFamily::defaults(prof);
    auto sweep_with_delta = [&](double delta) {
      std::vector<ModeContext> out;
      for (double li : {30.0, 45.0, 60.0, 90.0})
        out.push_back(
            ModeContext::from_lambda(prof, 1e-4, 200, {0.2, li}, 2.0 / 3.0, delta, d));
      return out;
    };
    const SweepResult loose = verify_inequality("navier-slip-resolvent", prof,
                                                sweep_with_delta(0.006), grid, 3, 13);
    const SweepResult tight = verify_inequality("navier-slip-resolvent", prof,
                                                sweep_with_delta(0.003), grid, 3, 13);
    REQUIRE(!loose.reports.empty());
    REQUIRE(!tight.reports.empty());
    CHECK(tight.rejected.size() > loose.rejected.size());
    CHECK(tight.summary.sup_ratio <= loose.summary.sup_ratio * (1.0 + 1e-12));
  }
}

TEST_CASE("corrector inequality ids run end to end") {
  const ShearProfile prof = make_builtin_profile("exp");
  const HalfLineGrid grid = solver_grid(128);
  const ModeContext ctx = line_ctx(prof, 1e-4, 150, 2.0 / 3.0, 0.006);
  for (const std::string id :
       {"corrector-error", "corrector-norms", "corrector-J", "corrector-Wb"}) {
    const SweepResult r = verify_inequality(id, prof, {ctx}, grid, 1, 5);
    REQUIRE_MESSAGE(!r.reports.empty(), id);
    CHECK(std::isfinite(r.summary.sup_ratio));
    CHECK(r.summary.sup_ratio > 0.0);
  }
}
