#include "blstab/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blstab/csvio.hpp"
#include "blstab/resolvent.hpp"

namespace blstab {

ZNormParams ZNormParams::make(double gamma, double bigk, double horizon, double d,
                              double delta) {
  ZNormParams zp;
  zp.gamma = gamma;
  zp.bigk = bigk;
  zp.horizon = horizon;
  zp.d = d;
  zp.q = d - 3.0 * (1.0 - gamma) - 1.0;
  zp.delta = delta;
  zp.beta = beta_exponent(gamma);
  if (!(zp.q > 1.0 && zp.q < d))
    throw ConfigError("z-norm: q = d - 3(1-gamma) - 1 must lie in (1, d)");
  return zp;
}

double beta_exponent(double gamma) {
  const double b1 = 7.0 * (1.0 - gamma) / (8.0 * gamma) + 1.0 / (8.0 * gamma) + 1e-3;
  const double b2 = 3.0 / 16.0 + 15.0 * (1.0 - gamma) / 16.0;
  return std::max(b1, b2);
}

VelocityMode SimState::mode_velocity(const HalfLineGrid& grid, int n) const {
  const int na = std::abs(n);
  if (na == 0) return {mean_v1, CVec::Zero(grid.size())};
  if (na > n_max()) throw ShapeError("mode_velocity: mode outside the retained band");
  const double beta = static_cast<double>(na) * std::sqrt(nu);
  const CVec& p = psi[na - 1];
  VelocityMode v{-grid.d1_apply(p), Complex(0.0, beta) * p};
  if (n < 0) {
    v.v1 = v.v1.conjugate();
    v.v2 = v.v2.conjugate();
  }
  return v;
}

VelocityMode leray_project(const HalfLineGrid& grid, double beta,
                           const VelocityMode& v, CVec* psi_out) {
  const int N = grid.size();
  const Mat d1i = grid.d1().block(0, 1, N, N - 2); // psi(0) = psi(L) = 0
  const Vec& w = grid.quad_weights();
  Mat g = d1i.transpose() * w.asDiagonal() * d1i;
  for (int j = 0; j < N - 2; ++j) g(j, j) += beta * beta * w[j + 1];
  Eigen::LDLT<Mat> ldlt(g);
  const Complex ib(0.0, beta);
  auto solve_ls = [&](const CVec& r1, const CVec& r2) {
    // normal equations of min |(-psi' - r1, i beta psi - r2)|^2
    CVec rhs = -d1i.transpose().cast<Complex>() * w.cast<Complex>().cwiseProduct(r1);
    for (int j = 0; j < N - 2; ++j) rhs[j] -= ib * w[j + 1] * r2[j + 1];
    const Vec re = ldlt.solve(rhs.real().eval());
    const Vec im = ldlt.solve(rhs.imag().eval());
    CVec psi = CVec::Zero(N);
    for (int j = 0; j < N - 2; ++j) psi[j + 1] = Complex(re[j], im[j]);
    return psi;
  };
  CVec psi = solve_ls(v.v1, v.v2);
  // one refinement pass keeps the projector idempotent to near roundoff
  VelocityMode out{-grid.d1_apply(psi), ib * psi};
  const CVec corr = solve_ls((v.v1 - out.v1).eval(), (v.v2 - out.v2).eval());
  psi += corr;
  out = {-grid.d1_apply(psi), ib * psi};
  if (psi_out) *psi_out = psi;
  return out;
}

NonlinearTerm nonlinear_term(const SimState& state, const HalfLineGrid& grid) {
  const int nm = state.n_max();
  const int N = grid.size();
  // cache modes -nm..nm and their Y-derivatives
  std::vector<VelocityMode> u(2 * nm + 1);
  std::vector<VelocityMode> du(2 * nm + 1);
  for (int n = -nm; n <= nm; ++n) {
    u[n + nm] = state.mode_velocity(grid, n);
    du[n + nm] = {grid.d1_apply(u[n + nm].v1), grid.d1_apply(u[n + nm].v2)};
  }
  NonlinearTerm out;
  out.projected.resize(nm + 1);
  out.curl.resize(nm);
  for (int n = 0; n <= nm; ++n) {
    CVec g1 = CVec::Zero(N), g2 = CVec::Zero(N);
    for (int j = -nm; j <= nm; ++j) {
      const int k = n - j;
      if (k < -nm || k > nm) continue;
      const Complex ibk(0.0, static_cast<double>(k) * std::sqrt(state.nu));
      const auto& uj = u[j + nm];
      const auto& uk = u[k + nm];
      const auto& duk = du[k + nm];
      for (int p = 0; p < N; ++p) {
        g1[p] += uj.v1[p] * (ibk * uk.v1[p]) + uj.v2[p] * duk.v1[p];
        g2[p] += uj.v1[p] * (ibk * uk.v2[p]) + uj.v2[p] * duk.v2[p];
      }
    }
    if (n == 0) {
      // projection keeps the x-component, drops the gradient part in y
      out.mean_x = g1;
      out.projected[0] = {g1, CVec::Zero(N)};
      // reality: the zero mode of a real field is real up to roundoff
    } else {
      const double bn = static_cast<double>(n) * std::sqrt(state.nu);
      const Complex ibn(0.0, bn);
      out.curl[n - 1] = ibn * g2 - grid.d1_apply(g1);
      out.projected[n] = leray_project(grid, bn, {g1, g2});
    }
  }
  return out;
}

StateNorms state_norms(const SimState& state, const HalfLineGrid& grid,
                       const ZNormParams& zp, double t) {
  StateNorms out;
  const double nu = state.nu;
  const double kt = zp.k_of_t(t);
  for (int n = 0; n <= state.n_max(); ++n) {
    const VelocityMode v = state.mode_velocity(grid, n);
    double l2 = 0.0, grad_y = 0.0;
    CVec mag(grid.size());
    const CVec d1 = grid.d1_apply(v.v1), d2v = grid.d1_apply(v.v2);
    for (int j = 0; j < grid.size(); ++j) {
      l2 += grid.quad_weights()[j] * (std::norm(v.v1[j]) + std::norm(v.v2[j]));
      grad_y += grid.quad_weights()[j] * (std::norm(d1[j]) + std::norm(d2v[j]));
      mag[j] = std::sqrt(std::norm(v.v1[j]) + std::norm(v.v2[j]));
    }
    const double mode_l2 = std::pow(nu, 0.25) * std::sqrt(l2);
    const double mode_linf = norm_linf(grid, mag);
    const double mode_grad =
        std::sqrt(static_cast<double>(n) * n * std::sqrt(nu) * l2 + grad_y / std::sqrt(nu));
    const double na = std::abs(n);
    const double weight = (1.0 + std::pow(na, zp.q)) *
                          std::exp(kt * std::pow(1.0 + na * na, zp.gamma / 2.0));
    out.x = std::max(out.x, weight * mode_l2);
    out.y = std::max(out.y, weight * mode_linf);
    out.grad_x = std::max(out.grad_x, weight * mode_grad);
    const double mult = (n == 0) ? 1.0 : 2.0; // conjugate mode
    out.l2 += mult * mode_l2 * mode_l2;
    out.grad_l2 += mult * mode_grad * mode_grad;
  }
  out.l2 = std::sqrt(out.l2);
  out.grad_l2 = std::sqrt(out.grad_l2);
  return out;
}

double x1_norm(const SimState& state, const HalfLineGrid& grid, const ZNormParams& zp) {
  double best = 0.0;
  for (int n = 0; n <= state.n_max(); ++n) {
    const VelocityMode v = state.mode_velocity(grid, n);
    double l2 = 0.0, grad_y = 0.0;
    const CVec d1 = grid.d1_apply(v.v1), d2v = grid.d1_apply(v.v2);
    for (int j = 0; j < grid.size(); ++j) {
      l2 += grid.quad_weights()[j] * (std::norm(v.v1[j]) + std::norm(v.v2[j]));
      grad_y += grid.quad_weights()[j] * (std::norm(d1[j]) + std::norm(d2v[j]));
    }
    // L^2_x H^1_y in the original variables
    const double m = std::sqrt(std::sqrt(state.nu) * l2 + grad_y / std::sqrt(state.nu));
    const double na = std::abs(n);
    const double weight = (1.0 + std::pow(na, zp.d)) *
                          std::exp(zp.bigk * std::pow(1.0 + na * na, zp.gamma / 2.0));
    best = std::max(best, weight * m);
  }
  return best;
}

EstimateReport check_convolution_bound(const SimState& state, const HalfLineGrid& grid,
                                       const ZNormParams& zp, double t) {
  const NonlinearTerm nt = nonlinear_term(state, grid);
  const StateNorms sn = state_norms(state, grid, zp, t);
  const double z_at_t =
      sn.x + std::pow(state.nu, 0.25) * sn.y + std::sqrt(state.nu * t) * sn.grad_x;
  double sup_ratio = 0.0;
  int argmax_n = 0;
  double lhs_at_max = 0.0, rhs_at_max = 0.0;
  for (int n = 0; n <= state.n_max(); ++n) {
    double l2 = 0.0;
    for (int j = 0; j < grid.size(); ++j)
      l2 += grid.quad_weights()[j] *
            (std::norm(nt.projected[n].v1[j]) + std::norm(nt.projected[n].v2[j]));
    const double lhs = std::pow(state.nu, 0.25) * std::sqrt(l2);
    if (lhs > 0.0 && z_at_t == 0.0)
      throw ConsistencyError("convolution bound: zero state norm with nonzero term");
    const double na = std::abs(n);
    const double shape = std::pow(state.nu * t, -0.5) *
                         std::exp(-zp.k_of_t(t) * std::pow(1.0 + na * na, zp.gamma / 2.0)) /
                         (1.0 + std::pow(na, zp.q - 0.5)) * z_at_t * z_at_t;
    const double ratio = shape > 0.0 ? lhs / shape : 0.0;
    if (ratio > sup_ratio) {
      sup_ratio = ratio;
      argmax_n = n;
      lhs_at_max = lhs;
      rhs_at_max = shape;
    }
  }
  EstimateReport r;
  r.inequality_id = "nonlinear-convolution";
  r.lhs = lhs_at_max;
  r.rhs_shape = rhs_at_max;
  r.ratio = sup_ratio;
  r.resolution = grid.size();
  r.nu = state.nu;
  r.n = argmax_n;
  r.gamma = zp.gamma;
  r.delta = zp.delta;
  r.time = t;
  return r;
}

namespace {

struct ModeStepper {
  CMat mass, stiff_d, stiff_a;
  Eigen::PartialPivLU<CMat> lu; // of mass - dt/2 stiff_d
  CMat expl;                    // mass + dt/2 stiff_d
  int rows_lo = 4;

  void prepare(double dt) {
    lu.compute((mass - 0.5 * dt * stiff_d).eval());
    expl = mass + 0.5 * dt * stiff_d;
  }
};

ModeStepper make_mode_stepper(const ShearProfile& profile, const HalfLineGrid& grid,
                              double nu, int n) {
  const int N = grid.size();
  const double alpha = std::sqrt(nu) * n;
  ModeStepper st;
  st.mass = CMat::Zero(N, N);
  st.stiff_d = CMat::Zero(N, N);
  st.stiff_a = CMat::Zero(N, N);
  Mat lap = grid.d2();
  for (int j = 0; j < N; ++j) lap(j, j) -= alpha * alpha;
  const Mat lap2 = lap * lap;
  st.mass(0, 0) = 1.0;
  for (int k = 0; k < N; ++k) st.mass(1, k) = grid.d1()(0, k);
  st.mass(2, N - 1) = 1.0;
  for (int k = 0; k < N; ++k) st.mass(3, k) = grid.d1()(N - 1, k);
  const Complex ib(0.0, alpha);
  for (int j = 1; j <= N - 4; ++j) {
    const int r = 3 + j;
    const double y = grid.nodes()[j];
    for (int k = 0; k < N; ++k) {
      st.mass(r, k) = lap(j, k);
      st.stiff_d(r, k) = std::sqrt(nu) * lap2(j, k);
      st.stiff_a(r, k) = -ib * profile.value(y) * lap(j, k);
    }
    st.stiff_a(r, j) += ib * profile.d2(y);
  }
  return st;
}

ModeStepper make_mean_stepper(const HalfLineGrid& grid, double nu) {
  const int N = grid.size();
  ModeStepper st;
  st.mass = CMat::Zero(N, N);
  st.stiff_d = CMat::Zero(N, N);
  st.stiff_a = CMat::Zero(N, N);
  st.mass(0, 0) = 1.0;
  st.mass(N - 1, N - 1) = 1.0;
  for (int j = 1; j < N - 1; ++j) {
    st.mass(j, j) = 1.0;
    for (int k = 0; k < N; ++k) st.stiff_d(j, k) = std::sqrt(nu) * grid.d2()(j, k);
  }
  st.rows_lo = 1;
  return st;
}

} // namespace

SimResult simulate(const ShearProfile& profile, const SimState& a, const ZNormParams& zp,
                   const HalfLineGrid& grid, const SimOptions& opts) {
  SimResult result;
  const int N = grid.size();
  const int nm = a.n_max();
  const double nu = a.nu;
  const double t_end = zp.t_max();
  result.a_x1_norm = x1_norm(a, grid, zp);

  // rescaled-time step from the advective and diffusive rates
  const double beta_max = std::sqrt(nu) * std::max(1, nm);
  double dtau = opts.dt_user > 0.0
                    ? opts.dt_user
                    : std::min(opts.cfl / beta_max,
                               0.25 / (std::sqrt(nu) * beta_max * beta_max));
  const double tau_end = t_end / std::sqrt(nu);
  dtau = std::min(dtau, tau_end / 64.0);

  std::vector<ModeStepper> steppers(nm + 1);
  steppers[0] = make_mean_stepper(grid, nu);
  for (int n = 1; n <= nm; ++n) steppers[n] = make_mode_stepper(profile, grid, nu, n);

  SimState state = a;
  auto record = [&](double running_z) {
    const StateNorms sn = state_norms(state, grid, zp, state.time);
    HistoryRecord h;
    h.t = state.time;
    h.x_norm = sn.x;
    h.y_norm = sn.y;
    h.grad_norm = std::sqrt(nu * state.time) * sn.grad_x;
    h.z_norm = std::max(running_z, sn.x + std::pow(nu, 0.25) * sn.y + h.grad_norm);
    h.l2 = sn.l2;
    h.grad_l2 = sn.grad_l2;
    result.history.push_back(h);
    return h.z_norm;
  };

  double z_running = record(0.0);
  double dt_prepared = -1.0;
  std::vector<CVec> expl_old(nm + 1);
  bool have_old = false;
  int step = 0;
  double tau = 0.0;
  while (tau < tau_end - 1e-14) {
    // cfl watchdog against the instantaneous advecting speed
    double umax = 0.0;
    for (int n = 0; n <= nm; ++n) {
      const VelocityMode v = state.mode_velocity(grid, n);
      for (int j = 0; j < N; ++j)
        umax = std::max(umax, std::sqrt(std::norm(v.v1[j]) + std::norm(v.v2[j])));
    }
    if (dtau * beta_max * (1.0 + umax) > opts.cfl * 2.0) {
      dtau *= 0.5;
      have_old = false;
      continue;
    }
    const double dt_now = std::min(dtau, tau_end - tau);
    if (dt_now != dt_prepared) {
      for (auto& st : steppers) st.prepare(dt_now);
      dt_prepared = dt_now;
      have_old = false;
    }

    // explicit part per mode: advection rows plus the nonlinear curl
    std::vector<CVec> expl_now(nm + 1);
    {
      NonlinearTerm nt;
      if (!opts.disable_nonlinearity) nt = nonlinear_term(state, grid);
      for (int n = 0; n <= nm; ++n) {
        const ModeStepper& st = steppers[n];
        const CVec& target = (n == 0) ? state.mean_v1 : state.psi[n - 1];
        CVec e = st.stiff_a * target;
        if (!opts.disable_nonlinearity) {
          if (n == 0) {
            for (int j = 1; j < N - 1; ++j) e[j] -= nt.mean_x[j];
          } else {
            for (int r = 4; r < N; ++r) e[r] -= nt.curl[n - 1][r - 3];
          }
        }
        expl_now[n] = std::move(e);
      }
    }
    for (int n = 0; n <= nm; ++n) {
      ModeStepper& st = steppers[n];
      CVec& target = (n == 0) ? state.mean_v1 : state.psi[n - 1];
      const CVec ab =
          have_old ? (1.5 * expl_now[n] - 0.5 * expl_old[n]).eval() : expl_now[n];
      target = st.lu.solve((st.expl * target + dt_now * ab).eval());
    }
    expl_old = std::move(expl_now);
    have_old = true;
    tau += dt_now;
    state.time = tau * std::sqrt(nu);
    ++step;

    if (step % opts.save_every == 0 || tau >= tau_end - 1e-14) {
      z_running = record(z_running);
      if (z_running > opts.z_ceiling * std::max(result.a_x1_norm, 1e-300)) {
        result.early_stop = true;
        result.note = "z-norm passed the configured ceiling";
        break;
      }
    }
  }
  result.final_state = state;
  result.stable = !result.early_stop;
  return result;
}

void write_state_csv(const std::filesystem::path& path, const HalfLineGrid& grid,
                     const SimState& state) {
  std::vector<std::pair<std::string, CVec>> cols;
  cols.emplace_back("mean", state.mean_v1);
  for (int n = 1; n <= state.n_max(); ++n)
    cols.emplace_back("psi" + std::to_string(n), state.psi[n - 1]);
  write_grid_function_csv(path, grid, cols);
}

SimState load_state_csv(const std::filesystem::path& path, const HalfLineGrid& grid,
                        double nu) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot " + path.string());
  std::string header;
  std::getline(in, header);
  int cols = 0;
  for (char ch : header) cols += ch == ',';
  if (cols < 3 || cols % 2 != 0)
    throw ConfigError("snapshot: expected Y plus Re/Im column pairs");
  const int n_fields = cols / 2;
  std::vector<double> ys;
  std::vector<CVec> data(n_fields);
  std::vector<std::vector<Complex>> rows(n_fields);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    ys.push_back(std::stod(cell));
    for (int f = 0; f < n_fields; ++f) {
      std::getline(ss, cell, ',');
      const double re = std::stod(cell);
      std::getline(ss, cell, ',');
      rows[f].push_back(Complex(re, std::stod(cell)));
    }
  }
  // interpolate onto the current grid through an auxiliary spline-free path:
  // snapshots are written on a toolkit grid, so linear interpolation in Y is
  // enough for restart purposes
  auto interp = [&](const std::vector<Complex>& v, double y) {
    if (y <= ys.front()) return v.front();
    if (y >= ys.back()) return v.back();
    const auto it = std::upper_bound(ys.begin(), ys.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - ys.begin());
    const double t = (y - ys[i - 1]) / (ys[i] - ys[i - 1]);
    return (1.0 - t) * v[i - 1] + t * v[i];
  };
  SimState st;
  st.nu = nu;
  st.mean_v1.resize(grid.size());
  st.psi.assign(n_fields - 1, CVec(grid.size()));
  for (int j = 0; j < grid.size(); ++j) {
    st.mean_v1[j] = interp(rows[0], grid.nodes()[j]);
    for (int f = 1; f < n_fields; ++f) st.psi[f - 1][j] = interp(rows[f], grid.nodes()[j]);
  }
  return st;
}

SimState gevrey_initial_data(const HalfLineGrid& grid, double nu, int n_max,
                             int n_active, const ZNormParams& zp, double amplitude,
                             unsigned long long seed) {
  std::mt19937_64 rng(seed);
  SimState st;
  st.nu = nu;
  st.mean_v1 = CVec::Zero(grid.size());
  st.psi.resize(n_max);
  for (int n = 1; n <= n_max; ++n) {
    if (n <= n_active) {
      CVec shape = random_decaying(grid, rng, 2);
      const double decay =
          std::exp(-zp.bigk * std::pow(1.0 + n * n, zp.gamma / 2.0)) /
          (1.0 + std::pow(n, zp.d + 1.0));
      st.psi[n - 1] = decay * shape;
    } else {
      st.psi[n - 1] = CVec::Zero(grid.size());
    }
  }
  const double norm0 = x1_norm(st, grid, zp);
  const double scale = amplitude / std::max(norm0, 1e-300);
  for (auto& p : st.psi) p *= scale;
  return st;
}

} // namespace blstab
