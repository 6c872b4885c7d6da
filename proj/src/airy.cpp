#include "blstab/airy.hpp"

#include <cmath>

namespace blstab {

namespace {

using C = std::complex<double>;

// ---- compensated (double-double) arithmetic for the Maclaurin sums ----
// The series loses ~e^{2|zeta|} to cancellation in the decay directions;
// double-double keeps the |z| = 6 switch radius honest to ~1e-23.

struct DD {
  double hi = 0.0, lo = 0.0;
};

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  return two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return two_sum(p.hi, p.lo);
}

inline DD dd_div_d(DD a, double b) {
  double q1 = a.hi / b;
  DD p = two_prod(q1, b);
  double r = ((a.hi - p.hi) - p.lo + a.lo) / b;
  return two_sum(q1, r);
}

inline DD dd_neg(DD a) { return {-a.hi, -a.lo}; }

struct CDD {
  DD re, im;
};

inline CDD cdd(C z) { return {{z.real(), 0.0}, {z.imag(), 0.0}}; }
inline C to_c(const CDD& z) { return {z.re.hi + z.re.lo, z.im.hi + z.im.lo}; }
inline CDD cdd_add(const CDD& a, const CDD& b) {
  return {dd_add(a.re, b.re), dd_add(a.im, b.im)};
}
inline CDD cdd_mul(const CDD& a, const CDD& b) {
  return {dd_add(dd_mul(a.re, b.re), dd_neg(dd_mul(a.im, b.im))),
          dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))};
}
inline CDD cdd_div_d(const CDD& a, double b) {
  return {dd_div_d(a.re, b), dd_div_d(a.im, b)};
}
inline CDD cdd_scale(const CDD& a, double b) {
  return {dd_mul(a.re, {b, 0.0}), dd_mul(a.im, {b, 0.0})};
}

// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3), split to
// double-double so the final f/g combination keeps its cancelled digits
constexpr DD kAi0{3.55028053887817219e-01, 2.05233632436211994e-17};
constexpr DD kAip0{-2.58819403792806824e-01, 2.52224311161083207e-17};

constexpr double kSeriesRadius = 6.0;
constexpr double kHysteresis = 0.1;
constexpr double kAsymptoticRadius = 8.7;
constexpr double kSeedRadius = 9.5;
constexpr double kMaxRadius = 1e4;

// Maclaurin: Ai = Ai(0) f + Ai'(0) g with
// f = sum a_k z^{3k}, g = sum b_k z^{3k+1}
AiryPair airy_series(C z) {
  const CDD zdd = cdd(z);
  const CDD z2 = cdd_mul(zdd, zdd);
  const CDD z3 = cdd_mul(z2, zdd);
  CDD f = cdd(1.0), g = cdd(z);
  CDD fp = cdd(0.0), gp = cdd(1.0);
  CDD tf = cdd(1.0), tg = cdd(z);
  CDD tfp = cdd_scale(z2, 0.5), tgp = cdd(1.0);
  for (int k = 1; k < 220; ++k) {
    tf = cdd_div_d(cdd_mul(tf, z3), (3.0 * k) * (3.0 * k - 1.0));
    tg = cdd_div_d(cdd_mul(tg, z3), (3.0 * k + 1.0) * (3.0 * k));
    if (k >= 2) tfp = cdd_div_d(cdd_mul(tfp, z3), 3.0 * (k - 1.0) * (3.0 * k - 1.0));
    tgp = cdd_div_d(cdd_mul(tgp, z3), (3.0 * k - 2.0) * (3.0 * k));
    f = cdd_add(f, tf);
    g = cdd_add(g, tg);
    fp = cdd_add(fp, tfp);
    gp = cdd_add(gp, tgp);
    if (std::abs(to_c(tf)) + std::abs(to_c(tg)) < 1e-42) break;
  }
  auto combine = [](const CDD& a, const CDD& b) {
    return to_c(cdd_add(CDD{dd_mul(kAi0, a.re), dd_mul(kAi0, a.im)},
                        CDD{dd_mul(kAip0, b.re), dd_mul(kAip0, b.im)}));
  };
  return {combine(f, g), combine(fp, gp), AiryMethod::Series};
}

// one-sided expansion; trustworthy for |z| >= 8.7 and |arg z| <= 2pi/3
AiryPair airy_asymptotic(C z) {
  const C zeta = 2.0 / 3.0 * std::pow(z, 1.5);
  const C z14 = std::pow(z, 0.25);
  if (-zeta.real() > 690.0) throw AiryOverflow("airy: overflow in the growing sector");
  C su = 1.0, sv = 1.0;
  double u = 1.0;
  C pw = 1.0;
  double prev = 1e300;
  for (int k = 1; k <= 80; ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
    pw /= -zeta;
    const double tsz = u * std::abs(pw);
    if (tsz > prev) break;
    prev = tsz;
    su += u * pw;
    sv += u * (6.0 * k + 1.0) / (1.0 - 6.0 * k) * pw;
    if (tsz < 1e-18) break;
  }
  const double c = 0.5 / std::sqrt(M_PI);
  const C e = std::exp(-zeta);
  return {c * e / z14 * su, -c * e * z14 * sv, AiryMethod::Asymptotic};
}

// Taylor continuation of (Ai, Ai') over one straight step; f'' = z f
void taylor_step(C z0, C h, C& f, C& fp) {
  constexpr int order = 28;
  C c[order + 1];
  c[0] = f;
  c[1] = fp;
  for (int n = 0; n + 2 <= order; ++n) {
    C rec = z0 * c[n];
    if (n >= 1) rec += c[n - 1];
    c[n + 2] = rec / ((n + 2.0) * (n + 1.0));
  }
  C fv = c[order], fd = 0.0;
  for (int n = order - 1; n >= 0; --n) {
    fd = fd * h + c[n + 1] * (n + 1.0);
    fv = fv * h + c[n];
  }
  f = fv;
  fp = fd;
}

void march(C from, C to, C& f, C& fp) {
  const int steps = std::max(4, static_cast<int>(std::ceil(std::abs(to - from) / 0.4)));
  C zs = from;
  const C h = (to - from) / static_cast<double>(steps);
  for (int k = 0; k < steps; ++k) {
    taylor_step(zs, h, f, fp);
    zs += h;
  }
}

// |arg z| <= 2pi/3. In the annulus, march inward radially inside |arg| <= pi/3
// (contamination by the dominant solution only shrinks there), then along the
// arc of constant |z| (Ai grows along it, again stable).
AiryPair airy_direct(C z) {
  const double r = std::abs(z);
  if (r >= kAsymptoticRadius) return airy_asymptotic(z);
  const double th = std::arg(z);
  if (std::abs(th) <= M_PI / 3.0) {
    const C seed_at = kSeedRadius * (z / r);
    AiryPair seed = airy_asymptotic(seed_at);
    C f = seed.ai, fp = seed.ai_prime;
    march(seed_at, z, f, fp);
    return {f, fp, AiryMethod::Asymptotic};
  }
  const double sgn = th > 0 ? 1.0 : -1.0;
  const C seed_at = std::polar(kSeedRadius, sgn * M_PI / 3.0);
  AiryPair seed = airy_asymptotic(seed_at);
  C f = seed.ai, fp = seed.ai_prime;
  const C corner = std::polar(r, sgn * M_PI / 3.0);
  march(seed_at, corner, f, fp);
  // arc as a chain of chords
  const int arcs = std::max(4, static_cast<int>(std::ceil(r * std::abs(th - sgn * M_PI / 3.0) / 0.4)));
  C prev = corner;
  for (int k = 1; k <= arcs; ++k) {
    const double a = sgn * M_PI / 3.0 + (th - sgn * M_PI / 3.0) * k / arcs;
    const C next = std::polar(r, a);
    march(prev, next, f, fp);
    prev = next;
  }
  return {f, fp, AiryMethod::Asymptotic};
}

AiryPair airy_nonseries(C z) {
  if (std::abs(std::arg(z)) <= 2.0 * M_PI / 3.0) return airy_direct(z);
  // Ai(z) + w Ai(wz) + w^2 Ai(w^2 z) = 0, w = e^{2 pi i/3};
  // both rotated arguments have |arg| <= 2pi/3
  const C w = std::polar(1.0, 2.0 * M_PI / 3.0);
  const C wb = std::conj(w);
  AiryPair p1 = airy_direct(w * z);
  AiryPair p2 = airy_direct(wb * z);
  return {-w * p1.ai - wb * p2.ai, -w * w * p1.ai_prime - wb * wb * p2.ai_prime,
          AiryMethod::Asymptotic};
}

} // namespace

AiryPair airy(C z) {
  if (std::abs(z) > kMaxRadius)
    throw AiryDomainError("airy: |z| beyond supported radius, request a scaled variant");
  if (std::abs(z) <= kSeriesRadius) return airy_series(z);
  return airy_nonseries(z);
}

AiryPair airy_branch(C z, AiryMethod which) {
  const double r = std::abs(z);
  if (which == AiryMethod::Series) {
    if (r > kSeriesRadius * (1.0 + kHysteresis))
      throw AiryDomainError("airy: series branch outside its radius");
    return airy_series(z);
  }
  if (r < kSeriesRadius * (1.0 - kHysteresis))
    throw AiryDomainError("airy: asymptotic branch below its radius");
  return airy_nonseries(z);
}

namespace {

// adaptive Gauss-Kronrod (G7, K15) on straight segments
const double kGkNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kGkWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

template <class F>
C gk_segment(F&& f, C a, C b, double& err) {
  const C mid = 0.5 * (a + b), half = 0.5 * (b - a);
  C k15 = 0.0, g7 = 0.0;
  for (int i = 0; i < 15; ++i) {
    const C v = f(mid + half * kGkNodes[i]);
    k15 += kGkWeights[i] * v;
    if (i % 2 == 1) g7 += kGaussWeights[i / 2] * v;
  }
  k15 *= half;
  g7 *= half;
  err = std::abs(k15 - g7);
  return k15;
}

template <class F>
C gk_adaptive(F&& f, C a, C b, double tol, int max_depth = 12, int depth = 0) {
  double err;
  const C v = gk_segment(f, a, b, err);
  // children keep a mildly reduced tolerance; halving it races the roundoff
  // plateau of the error estimate and recurses forever
  if (err < tol || depth >= max_depth) return v;
  const C mid = 0.5 * (a + b);
  return gk_adaptive(f, a, mid, 0.6 * tol, max_depth, depth + 1) +
         gk_adaptive(f, mid, b, 0.6 * tol, max_depth, depth + 1);
}

} // namespace

C a0(C z) {
  const C rot = std::polar(1.0, M_PI / 6.0);
  const C w0 = rot * z;
  const auto ai_at = [](C t) { return airy(t).ai; };
  const C zeta = (std::abs(w0) > 1e-12) ? C(2.0 / 3.0) * std::pow(w0, 1.5) : C(0.0);

  if (zeta.real() > 0.05 && std::abs(w0) > 0.3) {
    // tail integral along the steepest-descent direction phi = -arg(w0)/2
    const C dir = std::polar(1.0, -std::arg(w0) / 2.0);
    double s_end = 1.0;
    while (s_end < 400.0) {
      const C t = w0 + dir * s_end;
      const C zt = 2.0 / 3.0 * std::pow(t, 1.5);
      if (zt.real() - zeta.real() > 45.0) break;
      s_end *= 1.6;
    }
    const double scale = std::abs(airy(w0).ai) + 1e-300;
    C acc = 0.0;
    double s = 0.0, h = 0.5;
    while (s < s_end) {
      const double s1 = std::min(s_end, s + h);
      acc += gk_adaptive(ai_at, w0 + dir * s, w0 + dir * s1, 1e-13 * scale);
      s = s1;
      h *= 1.7;
    }
    return acc;
  }
  // A0 = 1/3 - int_0^{w0} Ai; straight segment in panels short enough that
  // the local oscillation (phase rate ~ |t|^{1/2}) stays inside one GK rule
  const double r0 = std::abs(w0);
  const int pieces =
      std::max(1, static_cast<int>(std::ceil(r0 * std::sqrt(r0 + 1.0) / 2.0)));
  C acc = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const C a = w0 * (static_cast<double>(k) / pieces);
    const C b = w0 * (static_cast<double>(k + 1) / pieces);
    const double local =
        std::max({1e-30, std::abs(airy(a).ai), std::abs(airy(b).ai)});
    acc += gk_adaptive(ai_at, a, b, 1e-13 * local, 6);
  }
  return C(1.0 / 3.0, 0.0) - acc;
}

std::vector<RatioBoundReport> check_airy_ratio_bounds(const std::vector<C>& samples,
                                                      double sector_height) {
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].imag() > sector_height)
      throw AiryDomainError("ratio bounds: sample " + std::to_string(i) +
                            " above the sector height");

  RatioBoundReport mag{"airy-ratio-magnitude", 0.0, 0.0, 0.0, samples.size()};
  RatioBoundReport re{"airy-ratio-real-part", -1e300, 0.0, 1e300, samples.size()};
  RatioBoundReport second{"airy-ratio-second", 0.0, 0.0, 0.0, samples.size()};
  const C rot = std::polar(1.0, M_PI / 6.0);

  for (const C& z : samples) {
    const C v0 = a0(z);
    if (std::abs(v0) < 1e-280) throw AiryDomainError("ratio bounds: sample at an A0 zero");
    const AiryPair p = airy(rot * z);
    const C d1 = -rot * p.ai;             // A0'
    const C d2 = -rot * rot * p.ai_prime; // A0''
    const double s = 1.0 + std::sqrt(std::abs(z));
    const double r1 = std::abs(d1 / v0) / s;
    if (r1 > mag.sup_ratio) {
      mag.sup_ratio = r1;
      mag.argmax = z;
    }
    const double rr = (d1 / v0).real();
    const double c_here = -rr / s;
    if (c_here < re.fitted_constant) {
      re.fitted_constant = c_here;
      re.argmax = z;
    }
    re.sup_ratio = std::max(re.sup_ratio, rr); // must stay <= -1/3
    const double r2 = std::abs(d2 / v0) / (1.0 + std::abs(z));
    if (r2 > second.sup_ratio) {
      second.sup_ratio = r2;
      second.argmax = z;
    }
  }
  mag.fitted_constant = mag.sup_ratio;
  second.fitted_constant = second.sup_ratio;
  return {mag, re, second};
}

} // namespace blstab
