#include "blstab/modal.hpp"

#include <cmath>

namespace blstab {

ModeContext ModeContext::from_mu(const ShearProfile& profile, double nu, int n, Complex mu,
                                 double gamma, double delta, const DeltaFamily& deltas) {
  if (nu <= 0.0) throw ConfigError("mode context: nu must be positive");
  if (n == 0) throw ConfigError("mode context: n = 0 has no Orr-Sommerfeld reduction");
  ModeContext ctx;
  ctx.nu = nu;
  ctx.n = n;
  ctx.alpha = std::sqrt(nu) * std::abs(n);
  ctx.mu = mu;
  ctx.lambda = Complex(0.0, 1.0) * mu / (std::abs(n) * std::sqrt(nu));
  ctx.lambda_nu = ctx.lambda + Complex(0.0, 1.0) * std::sqrt(nu) * ctx.alpha;
  ctx.gamma = gamma;
  ctx.delta = delta;
  ctx.deltas = deltas;
  const double n13 = std::pow(std::abs(n), 1.0 / 3.0);
  ctx.scale_a = n13 * std::sqrt(1.0 + n13 * std::abs(ctx.lambda_nu));
  ctx.d_shift = -ctx.lambda_nu / profile.d1(0.0);
  return ctx;
}

ModeContext ModeContext::from_lambda(const ShearProfile& profile, double nu, int n,
                                     Complex lambda, double gamma, double delta,
                                     const DeltaFamily& deltas) {
  const Complex mu = -Complex(0.0, 1.0) * lambda * (std::abs(n) * std::sqrt(nu));
  return from_mu(profile, nu, n, mu, gamma, delta, deltas);
}

bool ModeContext::resolvent_admissible() const {
  if (delta <= 0.0) return false;
  const double threshold = std::sqrt(nu) * std::pow(std::abs(n), gamma) / delta;
  return mu.real() >= threshold * (1.0 - 1e-12);
}

std::string to_string(FrequencyRegime r) {
  switch (r) {
    case FrequencyRegime::Low: return "low";
    case FrequencyRegime::MiddleSmall: return "middle-small";
    case FrequencyRegime::MiddleLarge: return "middle-large";
    case FrequencyRegime::High: return "high";
  }
  return "?";
}

FrequencyRegime classify(const ShearProfile& profile, double nu, int n, double gamma) {
  if (nu <= 0.0) throw ConfigError("classify: nu must be positive");
  const double na = std::abs(n);
  const double inv_d0 = 1.0 / profile.delta0();
  if (na <= inv_d0) return FrequencyRegime::Low;
  if (na > inv_d0 * std::pow(nu, -0.75)) return FrequencyRegime::High;
  return std::pow(na, gamma) * std::sqrt(nu) < 1.0 ? FrequencyRegime::MiddleSmall
                                                   : FrequencyRegime::MiddleLarge;
}

std::vector<std::string> in_resolvent_region(const ModeContext& ctx, double theta) {
  if (!(theta > M_PI / 2.0 && theta < M_PI))
    throw ConfigError("in_resolvent_region: theta must lie in (pi/2, pi)");
  std::vector<std::string> tags;
  const double na = std::abs(ctx.n);
  const double rootnu = std::sqrt(ctx.nu);
  const double tan_t = std::tan(theta);
  const double c_line = (rootnu * na + std::abs(tan_t) * std::pow(na, ctx.gamma) * rootnu) /
                        ctx.deltas.delta1;
  const double re = ctx.mu.real(), im = ctx.mu.imag();
  if (std::abs(im) >= tan_t * re + c_line &&
      std::abs(ctx.mu) >= rootnu * na / ctx.deltas.delta1)
    tags.push_back("S-sector");
  if (ctx.delta > 0.0) {
    const double line = std::pow(na, ctx.gamma) * rootnu / ctx.delta;
    if (std::abs(ctx.mu) <= na * rootnu / ctx.deltas.delta1 && re >= line * (1.0 - 1e-12))
      tags.push_back("O-disc-line");
  }
  if (re + static_cast<double>(ctx.n) * ctx.n * std::pow(ctx.nu, 1.5) >=
      1.0 / ctx.deltas.delta2)
    tags.push_back("Im-large");
  return tags;
}

} // namespace blstab
