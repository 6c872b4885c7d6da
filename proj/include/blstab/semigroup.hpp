#pragma once

#include <random>

#include "blstab/ossolve.hpp"
#include "blstab/report.hpp"

namespace blstab {

struct MethodError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContourSegment {
  std::string name; // Gamma+, Gamma-, l+, l-, l0
  Complex start, end;
  std::vector<Complex> nodes;
  std::vector<Complex> weights; // complex d(mu) quadrature weights
};

struct ContourSpec {
  double theta = 0.0;
  double truncation = 0.0; // max |Re mu| on the rays
  double line_re = 0.0;    // Re mu on l0
  double line_im = 0.0;    // |Im mu| on l+-
  std::vector<ContourSegment> segments;

  std::size_t total_nodes() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.nodes.size();
    return n;
  }
};

struct ContourOptions {
  double max_phase = 4.0;  // tau * panel length cap
  int gl_order = 16;
  double tail_exponent = 45.0; // truncate rays once tau |Re mu| reaches this
  double ray_growth = 1.12;
};

// the spectrum-enclosing curve Gamma+- / l+- / l0 for e^{-tau L};
// l0 sits on Re mu = |n|^gamma nu^{1/2} / ctx.delta
ContourSpec build_contour(const ModeContext& ctx, double theta, double tau,
                          const ContourOptions& opt = {});

// pick delta so that tau * Re(l0) stays around `target` (quadrature headroom);
// exact representation only needs the line right of the spectrum
double conditioning_delta(double nu, int n, double gamma, double tau,
                          double target = 10.0);

enum class SemigroupMethod { Contour, Expm, Timestep };

// velocity mode on the grid: v = (v1, v2) in rescaled (X, Y) variables
struct VelocityMode {
  CVec v1, v2;
};

// per-mode evolution of the rescaled linearized problem in stream-function
// form; one discrete pencil serves the contour, expm and timestep paths
class ModeEvolution {
public:
  ModeEvolution(const ShearProfile& profile, const ModeContext& ctx,
                const HalfLineGrid& grid);

  const HalfLineGrid& grid() const { return grid_; }
  const ModeContext& ctx() const { return ctx_; }

  CVec stream_of(const VelocityMode& f, double* projection_gap = nullptr) const;
  VelocityMode velocity_of(const CVec& psi) const;

  CVec apply_expm(const CVec& psi, double tau) const;
  CVec apply_contour(const CVec& psi, double tau, double theta,
                     const ContourOptions& opt = {}) const;
  // Crank-Nicolson diffusion, Adams-Bashforth advection; nsteps = 0 picks a
  // step count from the advective and diffusive rates
  CVec apply_timestep(const CVec& psi, double tau, int nsteps = 0,
                      double* dissipation = nullptr) const;
  CVec resolvent_apply(Complex mu, const CVec& rhs_interior) const;

  // orthogonal projection onto the boundary-condition kernel; evolution
  // preserves the complement exactly, so stray far-field residuals in the
  // data otherwise persist as a decay floor
  CVec project_bc(const CVec& psi) const;

  double max_real_eigenvalue() const; // of the reduced generator (N <= 96)

private:
  const ShearProfile& profile_;
  ModeContext ctx_;
  const HalfLineGrid& grid_;
  CMat mass_;    // [bc rows; Lap rows]
  CMat stiff_d_; // diffusion rows
  CMat stiff_a_; // advection/stretching rows
  Eigen::PartialPivLU<CMat> mass_lu_;
  int dyn_lo_ = 1, dyn_hi_ = 0; // interior node range carrying the dynamics
};

VelocityMode apply_semigroup(const ShearProfile& profile, const ModeContext& ctx,
                             const HalfLineGrid& grid, const VelocityMode& f, double tau,
                             SemigroupMethod method, double theta = M_PI / 2 + 0.1,
                             int nsteps = 0);

struct SemigroupSweepPoint {
  double nu;
  int n;
  double gamma;
  double delta;
};

// regime-wise decay/growth reports for the linearized semigroup in the
// original (t, x, y) variables
std::vector<EstimateReport> verify_semigroup_bounds(
    const ShearProfile& profile, const std::vector<SemigroupSweepPoint>& sweep,
    const std::vector<double>& times, int draws, const HalfLineGrid& grid,
    unsigned long long seed);

struct StokesReport {
  std::vector<EstimateReport> displays;
  double energy_identity_gap = 0.0; // | ||u||^2 + 2 nu int ||grad u||^2 - ||f||^2 |
  bool projected = false;           // input was not solenoidal
};

// V = 0 path: heat semigroup with the divergence constraint, original variables
StokesReport check_stokes(const HalfLineGrid& grid, double nu, int n,
                          const VelocityMode& f, const std::vector<double>& times,
                          int nsteps = 0);

} // namespace blstab
