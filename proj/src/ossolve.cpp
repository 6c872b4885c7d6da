#include "blstab/ossolve.hpp"

#include <cmath>

#include "blstab/airy.hpp"

namespace blstab {

namespace {

enum class WallBc { Nonslip, Navier };

struct CompanionSystem {
  CMat a;         // 2N x 2N
  int first_dyn;  // index of the first vorticity row
};

// rows: 4 boundary rows, then Poisson on interior nodes, then the vorticity
// equation on interior nodes. unknown layout u = [phi; w].
CompanionSystem companion_matrix(const ShearProfile& profile, const ModeContext& ctx,
                                 const HalfLineGrid& grid, WallBc bc) {
  const int N = grid.size();
  const double alpha = ctx.alpha;
  const Complex ia(0.0, ctx.beta()); // signed for n < 0 (conjugate mode)
  const Complex lam = ctx.lambda_signed();
  const Mat& d1 = grid.d1();
  const Mat& d2 = grid.d2();

  CMat a = CMat::Zero(2 * N, 2 * N);
  int r = 0;
  a(r++, 0) = 1.0; // phi(0) = 0
  if (bc == WallBc::Nonslip) {
    for (int j = 0; j < N; ++j) a(r, j) = d1(0, j); // phi'(0) = 0
    ++r;
  } else {
    a(r++, N) = 1.0; // w(0) = 0
  }
  a(r++, N - 1) = 1.0; // phi(L) = 0
  if (bc == WallBc::Nonslip) {
    for (int j = 0; j < N; ++j) a(r, j) = d1(N - 1, j); // phi'(L) = 0
    ++r;
  } else {
    a(r++, 2 * N - 1) = 1.0; // w(L) = 0
  }
  for (int j = 1; j < N - 1; ++j) { // (d^2 - a^2) phi - w = 0
    for (int k = 0; k < N; ++k) a(r, k) = d2(j, k);
    a(r, j) -= alpha * alpha;
    a(r, N + j) = -1.0;
    ++r;
  }
  const int first_dyn = r;
  const double rootnu = std::sqrt(ctx.nu);
  for (int j = 1; j < N - 1; ++j) {
    for (int k = 0; k < N; ++k) a(r, N + k) = -rootnu * d2(j, k);
    a(r, N + j) += rootnu * alpha * alpha;
    a(r, N + j) += ia * (profile.value(grid.nodes()[j]) - lam);
    a(r, j) = -ia * profile.d2(grid.nodes()[j]);
    ++r;
  }
  return {std::move(a), first_dyn};
}

struct Factored {
  Eigen::PartialPivLU<CMat> lu;
  const CompanionSystem* sys;
  Vec row_scale; // equilibration factors applied before factorization
};

// rows of the companion system span many orders of magnitude (boundary rows
// against fourth-order stencils); equilibrate so the conditioning estimate
// measures distance to the spectrum rather than the imbalance
Factored factor(const CompanionSystem& sys) {
  const int m = static_cast<int>(sys.a.rows());
  Factored f;
  f.sys = &sys;
  f.row_scale.resize(m);
  CMat scaled = sys.a;
  for (int i = 0; i < m; ++i) {
    const double r = scaled.row(i).cwiseAbs().maxCoeff();
    f.row_scale[i] = r > 0.0 ? 1.0 / r : 1.0;
    scaled.row(i) *= f.row_scale[i];
  }
  f.lu.compute(scaled);
  const double rcond = f.lu.rcond();
  if (rcond < 1e-12) {
    Eigen::JacobiSVD<CMat> svd(scaled);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    throw NearSingularError("OS solve: discrete system nearly singular", smin);
  }
  return f;
}

CVec solve_with(const Factored& f, const HalfLineGrid& grid, const CVec& rhs_fn) {
  const int N = grid.size();
  CVec b = CVec::Zero(2 * N);
  for (int j = 1; j < N - 1; ++j)
    b[f.sys->first_dyn + (j - 1)] =
        rhs_fn[j] * f.row_scale[f.sys->first_dyn + (j - 1)];
  return f.lu.solve(b);
}

OSSolution finish_solution(const ShearProfile& profile, const ModeContext& ctx,
                           const HalfLineGrid& grid, const CompanionSystem& sys,
                           const CVec& u, const CVec& rhs_fn) {
  const int N = grid.size();
  OSSolution s;
  s.phi = u.head(N);
  s.w = u.tail(N);
  s.phi0 = s.phi[0];
  s.dphi0 = grid.deriv_at_wall(s.phi);
  s.w0 = s.w[0];
  CVec b = CVec::Zero(2 * N);
  for (int j = 1; j < N - 1; ++j) b[sys.first_dyn + (j - 1)] = rhs_fn[j];
  CVec res = sys.a * u - b;
  // quadrature-consistent residual over the dynamic rows
  double acc = 0.0;
  for (int j = 1; j < N - 1; ++j)
    acc += grid.quad_weights()[j] * std::norm(res[sys.first_dyn + (j - 1)]);
  s.residual_norm = std::sqrt(acc);
  s.pair_norm = norm_pair(grid, s.phi, ctx.alpha);
  s.w_norm = norm_l2(grid, s.w);
  return s;
}

} // namespace

CVec RhsSpec::assemble(const HalfLineGrid& grid, const ShearProfile& profile,
                       double alpha) const {
  const Complex ia(0.0, alpha);
  if (const auto* p = std::get_if<Pair>(&value)) {
    if (p->f1.size() != grid.size() || p->f2.size() != grid.size())
      throw ShapeError("rhs: length mismatch");
    return (-grid.d1_apply(p->f1) + ia * p->f2).eval();
  }
  if (const auto* p = std::get_if<VPrimeH>(&value)) {
    if (p->h.size() != grid.size()) throw ShapeError("rhs: length mismatch");
    CVec out(grid.size());
    for (int j = 0; j < grid.size(); ++j)
      out[j] = profile.d1(grid.nodes()[j]) * p->h[j];
    return out;
  }
  const auto& f = std::get<Direct>(value).f;
  if (f.size() != grid.size()) throw ShapeError("rhs: length mismatch");
  return f;
}

std::optional<double> RhsSpec::pair_norm(const HalfLineGrid& grid) const {
  if (const auto* p = std::get_if<Pair>(&value)) {
    const double a = norm_l2(grid, p->f1);
    const double b = norm_l2(grid, p->f2);
    return std::sqrt(a * a + b * b);
  }
  return std::nullopt;
}

OSSolution solve_os_nonslip(const ShearProfile& profile, const ModeContext& ctx,
                            const RhsSpec& rhs, const HalfLineGrid& grid) {
  const CompanionSystem sys = companion_matrix(profile, ctx, grid, WallBc::Nonslip);
  const Factored f = factor(sys);
  const CVec rhs_fn = rhs.assemble(grid, profile, ctx.beta());
  const CVec u = solve_with(f, grid, rhs_fn);
  return finish_solution(profile, ctx, grid, sys, u, rhs_fn);
}

OSSolution solve_os_navier(const ShearProfile& profile, const ModeContext& ctx,
                           const RhsSpec& rhs, const HalfLineGrid& grid) {
  const CompanionSystem sys = companion_matrix(profile, ctx, grid, WallBc::Navier);
  const Factored f = factor(sys);
  const CVec rhs_fn = rhs.assemble(grid, profile, ctx.beta());
  const CVec u = solve_with(f, grid, rhs_fn);
  OSSolution s = finish_solution(profile, ctx, grid, sys, u, rhs_fn);

  if (std::holds_alternative<RhsSpec::Pair>(rhs.value)) {
    // split w = w1 + w2: w1 keeps the divergence-structured part of the
    // operator, w2 carries V' h with h = i alpha phi1'
    const int N = grid.size();
    const double alpha = ctx.alpha;
    const Complex ia(0.0, ctx.beta());
    CompanionSystem sys1 = sys;
    // vorticity rows for w1: -sqrt(nu)(d^2-a^2)w1
    //   + i a ((V-lambda) w1 + V' phi1' - V'' phi1) = F
    for (int j = 1; j < N - 1; ++j) {
      const int r = sys1.first_dyn + (j - 1);
      const double vp = profile.d1(grid.nodes()[j]);
      for (int k = 0; k < N; ++k) sys1.a(r, k) += ia * vp * grid.d1()(j, k);
    }
    const Factored f1 = factor(sys1);
    const CVec u1 = solve_with(f1, grid, rhs_fn);
    s.phi1 = u1.head(N);
    s.w1 = u1.tail(N);
    CVec h = ia * grid.d1_apply(*s.phi1);
    const CVec rhs2 = RhsSpec::vprime_h(h).assemble(grid, profile, ctx.beta());
    const CVec u2 = solve_with(f, grid, rhs2);
    s.phi2 = u2.head(N);
    s.w2 = u2.tail(N);
  }
  return s;
}

OSSolution solve_rayleigh(const ShearProfile& profile, const ModeContext& ctx,
                          const CVec& h1, const CVec& h2, const CVec& h3,
                          const HalfLineGrid& grid) {
  if (ctx.lambda_i() <= 0.0)
    throw AiryDomainError("rayleigh: lambda_i <= 0 puts the critical layer on the axis");
  const int N = grid.size();
  const double alpha = ctx.alpha;
  const Complex ia(0.0, ctx.beta());
  CMat a = CMat::Zero(N, N);
  CVec b = CVec::Zero(N);
  a(0, 0) = 1.0;
  a(N - 1, N - 1) = 1.0;
  const CVec dh2 = grid.d1_apply(h2);
  const Complex lam = ctx.lambda_signed();
  for (int j = 1; j < N - 1; ++j) {
    const double y = grid.nodes()[j];
    const Complex vm = profile.value(y) - lam;
    for (int k = 0; k < N; ++k) a(j, k) = vm * grid.d2()(j, k);
    a(j, j) += -vm * alpha * alpha - profile.d2(y);
    b[j] = profile.d1(y) * h1[j] + dh2[j] + ia * h3[j];
  }
  Eigen::PartialPivLU<CMat> lu(a);
  if (lu.rcond() < 1e-12) {
    Eigen::JacobiSVD<CMat> svd(a);
    throw NearSingularError("rayleigh: nearly singular",
                            svd.singularValues()(svd.singularValues().size() - 1));
  }
  OSSolution s;
  s.phi = lu.solve(b);
  s.w = grid.d2_apply(s.phi) - alpha * alpha * s.phi;
  s.phi0 = s.phi[0];
  s.dphi0 = grid.deriv_at_wall(s.phi);
  s.w0 = s.w[0];
  CVec res = a * s.phi - b;
  double acc = 0.0;
  for (int j = 1; j < N - 1; ++j) acc += grid.quad_weights()[j] * std::norm(res[j]);
  s.residual_norm = std::sqrt(acc);
  s.pair_norm = norm_pair(grid, s.phi, alpha);
  s.w_norm = norm_l2(grid, s.w);
  return s;
}

CVec poisson_stream(const HalfLineGrid& grid, const CVec& w, double alpha) {
  const int N = grid.size();
  CMat a = CMat::Zero(N, N);
  CVec b = CVec::Zero(N);
  a(0, 0) = 1.0;
  a(N - 1, N - 1) = 1.0;
  for (int j = 1; j < N - 1; ++j) {
    for (int k = 0; k < N; ++k) a(j, k) = grid.d2()(j, k);
    a(j, j) -= alpha * alpha;
    b[j] = w[j];
  }
  return a.partialPivLu().solve(b);
}

CorrectorBundle build_corrector(const ShearProfile& profile, const ModeContext& ctx,
                                const HalfLineGrid& grid, bool use_divergence_rhs) {
  if (ctx.lambda_i() <= 0.0)
    throw AiryDomainError("corrector: needs Im lambda > 0");
  if (ctx.n <= 0) throw AiryDomainError("corrector: construction assumes n > 0");
  const double vp0 = profile.d1(0.0);
  if (vp0 <= 0.0) throw AiryDomainError("corrector: needs V'(0) > 0");

  const int N = grid.size();
  const double alpha = ctx.alpha;
  const Complex ia(0.0, alpha);
  const double kappa = std::pow(std::abs(ctx.n) * vp0, 1.0 / 3.0);
  const Complex rot = std::polar(1.0, M_PI / 6.0);

  CorrectorBundle cb;
  cb.ctx = ctx;
  cb.w_airy.resize(N);
  const Complex denom = airy(rot * kappa * ctx.d_shift).ai;
  for (int j = 0; j < N; ++j) {
    const Complex z = rot * kappa * (grid.nodes()[j] + ctx.d_shift);
    cb.w_airy[j] = airy(z).ai / denom;
  }
  cb.phi_airy = poisson_stream(grid, cb.w_airy, alpha);

  RhsSpec rhs = [&] {
    if (use_divergence_rhs) {
      // F11 = i a [(V - V'(0)Y) Phi_a' - (V' - V'(0)) Phi_a],
      // F12 = a^2 (V - V'(0)Y) Phi_a
      CVec f11(N), f12(N);
      const CVec dphia = grid.d1_apply(cb.phi_airy);
      for (int j = 0; j < N; ++j) {
        const double y = grid.nodes()[j];
        const double dev = profile.value(y) - vp0 * y;
        const double dev1 = profile.d1(y) - vp0;
        f11[j] = ia * (dev * dphia[j] - dev1 * cb.phi_airy[j]);
        f12[j] = alpha * alpha * dev * cb.phi_airy[j];
      }
      return RhsSpec::pair(std::move(f11), std::move(f12));
    }
    CVec f(N);
    for (int j = 0; j < N; ++j) {
      const double y = grid.nodes()[j];
      f[j] = -ia * (profile.value(y) - vp0 * y) * cb.w_airy[j] +
             ia * profile.d2(y) * cb.phi_airy[j];
    }
    return RhsSpec::direct(std::move(f));
  }();

  OSSolution err = solve_os_navier(profile, ctx, rhs, grid);
  cb.w_err = err.w;
  cb.phi_err = err.phi;
  cb.w_hom = cb.w_airy + cb.w_err;
  cb.phi_hom = cb.phi_airy + cb.phi_err;
  cb.j = grid.deriv_at_wall(cb.phi_hom);

  Complex j_quad = 0.0;
  for (int j = 0; j < N; ++j)
    j_quad -= grid.quad_weights()[j] * cb.w_hom[j] * std::exp(-alpha * grid.nodes()[j]);
  cb.j_quadrature_gap = std::abs(cb.j - j_quad);

  if (std::abs(cb.j) < 1e-3 / ctx.scale_a)
    throw DegenerateCorrectorError("corrector: |J| below the guaranteed A^{-1} scale");
  cb.w_b = cb.w_hom / cb.j;
  cb.phi_b = cb.phi_hom / cb.j;
  return cb;
}

OSSolution assemble_nonslip(const OSSolution& navier, const CorrectorBundle& bundle,
                            const HalfLineGrid& grid) {
  if (navier.phi.size() != bundle.phi_b.size())
    throw ConfigError("assemble: navier solution and corrector share no grid");
  const ModeContext& ctx = bundle.ctx;
  OSSolution s;
  const Complex coef = navier.dphi0;
  s.phi = navier.phi - coef * bundle.phi_b;
  s.w = navier.w - coef * bundle.w_b;
  s.phi0 = s.phi[0];
  s.dphi0 = grid.deriv_at_wall(s.phi);
  s.w0 = s.w[0];
  s.residual_norm = navier.residual_norm;
  s.pair_norm = norm_pair(grid, s.phi, ctx.alpha);
  s.w_norm = norm_l2(grid, s.w);
  return s;
}

} // namespace blstab
