#pragma once

#include <optional>
#include <variant>

#include "blstab/modal.hpp"
#include "blstab/norms.hpp"

namespace blstab {

struct NearSingularError : std::runtime_error {
  double smallest_singular_value;
  NearSingularError(const std::string& what, double sv)
      : std::runtime_error(what), smallest_singular_value(sv) {}
};

struct DegenerateCorrectorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// right-hand sides of the mode problem: either the pair (F1, F2) with
// F = -d_Y F1 + i alpha F2, a single h for the V'h form, or F directly
struct RhsSpec {
  struct Pair {
    CVec f1, f2;
  };
  struct VPrimeH {
    CVec h;
  };
  struct Direct {
    CVec f;
  };
  std::variant<Pair, VPrimeH, Direct> value;

  static RhsSpec pair(CVec f1, CVec f2) { return {Pair{std::move(f1), std::move(f2)}}; }
  static RhsSpec vprime_h(CVec h) { return {VPrimeH{std::move(h)}}; }
  static RhsSpec direct(CVec f) { return {Direct{std::move(f)}}; }

  CVec assemble(const HalfLineGrid& grid, const ShearProfile& profile,
                double alpha) const;
  // ||(F1,F2)|| when in pair form
  std::optional<double> pair_norm(const HalfLineGrid& grid) const;
};

struct OSSolution {
  CVec phi;
  CVec w;
  Complex phi0, dphi0, w0; // boundary data
  double residual_norm = 0.0;
  double pair_norm = 0.0; // ||(d_Y phi, alpha phi)||
  double w_norm = 0.0;
  // Navier-slip decomposition, filled by solve_os_navier on pair input
  std::optional<CVec> w1, phi1, w2, phi2;
};

// -sqrt(nu)(d^2-a^2)w + i a ((V-lambda) w - V'' phi) = F, (d^2-a^2)phi = w
// nonslip: phi(0) = phi'(0) = 0; navier: w(0) = phi(0) = 0
OSSolution solve_os_nonslip(const ShearProfile& profile, const ModeContext& ctx,
                            const RhsSpec& rhs, const HalfLineGrid& grid);
OSSolution solve_os_navier(const ShearProfile& profile, const ModeContext& ctx,
                           const RhsSpec& rhs, const HalfLineGrid& grid);

// (V - lambda)(d^2 - a^2) phi - V'' phi = V' h1 + d_Y h2 + i a h3, phi(0) = 0
OSSolution solve_rayleigh(const ShearProfile& profile, const ModeContext& ctx,
                          const CVec& h1, const CVec& h2, const CVec& h3,
                          const HalfLineGrid& grid);

// (d^2 - alpha^2) phi = w with phi(0) = 0 and decay
CVec poisson_stream(const HalfLineGrid& grid, const CVec& w, double alpha);

struct CorrectorBundle {
  CVec w_airy, phi_airy; // W_a, Phi_a
  CVec w_err, phi_err;   // W_e, Phi_e
  CVec w_hom, phi_hom;   // W = W_a + W_e and its stream function
  Complex j;             // d_Y Phi(0)
  CVec w_b, phi_b;       // normalized corrector
  ModeContext ctx;
  double j_quadrature_gap = 0.0; // |J + int W e^{-aY}| consistency
};

// scaled-Airy boundary layer corrector; requires Im lambda > 0, V'(0) > 0.
// use_divergence_rhs selects the (-d_Y F11 + i a F12) rewriting of the error
// equation's right-hand side
CorrectorBundle build_corrector(const ShearProfile& profile, const ModeContext& ctx,
                                const HalfLineGrid& grid,
                                bool use_divergence_rhs = false);

// w = w_Na - d_Y phi_Na(0) W_b, phi accordingly
OSSolution assemble_nonslip(const OSSolution& navier, const CorrectorBundle& bundle,
                            const HalfLineGrid& grid);

} // namespace blstab
