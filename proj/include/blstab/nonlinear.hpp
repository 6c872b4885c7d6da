#pragma once

#include <filesystem>
#include <random>

#include "blstab/report.hpp"
#include "blstab/semigroup.hpp"

namespace blstab {

// composite-norm parameters of the nonlinear estimate;
// q = d - 3(1-gamma) - 1 must land in (1, d)
struct ZNormParams {
  double gamma = 0.75;
  double bigk = 0.5;
  double horizon = 1.0; // requested T
  double d = 0.0;
  double q = 0.0;
  double delta = 0.5;
  double beta = 0.0;

  static ZNormParams make(double gamma, double bigk, double horizon, double d,
                          double delta);
  double k_of_t(double t) const { return bigk - 2.0 * t / delta; }
  double t_max() const { return std::min(horizon, delta * bigk / 2.0); }
};

// the smallness exponent of the initial data, with the paper's open "+"
// realized as +1e-3
double beta_exponent(double gamma);

// spectral state: stream functions for n = 1..n_max plus the mean flow;
// negative modes are conjugates (real velocity field)
struct SimState {
  double nu = 0.0;
  double time = 0.0; // original t
  CVec mean_v1;
  std::vector<CVec> psi; // psi[k] is mode n = k+1

  int n_max() const { return static_cast<int>(psi.size()); }
  VelocityMode mode_velocity(const HalfLineGrid& grid, int n) const;
};

struct NonlinearTerm {
  std::vector<VelocityMode> projected; // modes 0..n_max, Leray-projected
  std::vector<CVec> curl;              // curl of the unprojected term, modes 1..n_max
  CVec mean_x;                         // x-component at n = 0
};

// L2-orthogonal projection of a velocity mode onto the discrete solenoidal
// subspace {(-psi', i beta psi)}, beta = n nu^{1/2}; realized as a
// least-squares solve for the stream function
VelocityMode leray_project(const HalfLineGrid& grid, double beta,
                           const VelocityMode& v, CVec* psi_out = nullptr);

// P_n P(u . grad u) for the retained modes; the convolution runs exactly over
// the retained band, so no aliasing enters
NonlinearTerm nonlinear_term(const SimState& state, const HalfLineGrid& grid);

struct HistoryRecord {
  double t = 0.0;
  double x_norm = 0.0;
  double y_norm = 0.0;
  double grad_norm = 0.0; // the (nu t)^{1/2}-weighted component
  double z_norm = 0.0;    // running composite
  double l2 = 0.0;        // plain energy norm
  double grad_l2 = 0.0;
};

struct SimOptions {
  int save_every = 8;
  double dt_user = 0.0;    // 0: automatic
  double cfl = 0.4;
  double z_ceiling = 1e6;  // blow-up guard relative to the initial X1 norm
  bool disable_nonlinearity = false;
};

struct SimResult {
  std::vector<HistoryRecord> history;
  SimState final_state;
  bool stable = true;
  bool early_stop = false;
  double a_x1_norm = 0.0;
  std::string note;
};

EstimateReport check_convolution_bound(const SimState& state, const HalfLineGrid& grid,
                                       const ZNormParams& zp, double t);

SimResult simulate(const ShearProfile& profile, const SimState& a, const ZNormParams& zp,
                   const HalfLineGrid& grid, const SimOptions& opts = {});

// Gevrey-decaying random initial data scaled to ||a||_{X^{(1)}} = amplitude
SimState gevrey_initial_data(const HalfLineGrid& grid, double nu, int n_max,
                             int n_active, const ZNormParams& zp, double amplitude,
                             unsigned long long seed);

// snapshot round trip: columns Y, then Re/Im of the mean flow and each mode
void write_state_csv(const std::filesystem::path& path, const HalfLineGrid& grid,
                     const SimState& state);
SimState load_state_csv(const std::filesystem::path& path, const HalfLineGrid& grid,
                        double nu);

// mode norms of a state in the original variables
struct StateNorms {
  double x = 0.0, y = 0.0, grad_x = 0.0, l2 = 0.0, grad_l2 = 0.0;
};
StateNorms state_norms(const SimState& state, const HalfLineGrid& grid,
                       const ZNormParams& zp, double t);
double x1_norm(const SimState& state, const HalfLineGrid& grid, const ZNormParams& zp);

} // namespace blstab
