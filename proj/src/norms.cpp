#include "blstab/norms.hpp"

#include <cmath>

namespace blstab {

WeightSpec WeightSpec::rho(double n_abs, double gamma, double delta) {
  WeightSpec w;
  w.kind = Kind::Rho;
  w.breakpoint = std::pow(std::pow(n_abs, gamma - 2.0 / 3.0) / delta, -1.5);
  w.slope = 1.0 / w.breakpoint;
  return w;
}

WeightSpec WeightSpec::rho_lambda(double n_abs, double lambda_i) {
  WeightSpec w;
  w.kind = Kind::RhoLambda;
  w.breakpoint = std::pow(std::pow(n_abs, 1.0 / 3.0) * lambda_i, -1.5);
  w.slope = 1.0 / w.breakpoint;
  return w;
}

namespace {

void check_size(const HalfLineGrid& grid, const CVec& v) {
  if (v.size() != grid.size()) throw ShapeError("norm: value/grid length mismatch");
}

// local cubic through 4 neighbouring nodes, sampled at r points per interval
template <class F>
double refined_sup(const HalfLineGrid& grid, F&& magnitude) {
  const int N = grid.size();
  const auto& y = grid.nodes();
  double best = 0.0;
  for (int j = 0; j < N; ++j) best = std::max(best, magnitude(j, y[j], true));
  const int r = 8;
  for (int j = 0; j < N - 1; ++j) {
    for (int k = 1; k < r; ++k) {
      const double t = y[j] + (y[j + 1] - y[j]) * k / r;
      best = std::max(best, magnitude(j, t, false));
    }
  }
  return best;
}

Complex cubic_eval(const HalfLineGrid& grid, const CVec& v, int cell, double t) {
  const int N = grid.size();
  int i0 = std::max(0, std::min(cell - 1, N - 4));
  const auto& y = grid.nodes();
  Complex acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) l *= (t - y[i0 + b]) / (y[i0 + a] - y[i0 + b]);
    acc += l * v[i0 + a];
  }
  return acc;
}

} // namespace

double norm_l2(const HalfLineGrid& grid, const CVec& v) {
  check_size(grid, v);
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) acc += grid.quad_weights()[j] * std::norm(v[j]);
  return std::sqrt(acc);
}

double norm_weighted_l2(const HalfLineGrid& grid, const CVec& v, const WeightSpec& w) {
  check_size(grid, v);
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j)
    acc += grid.quad_weights()[j] * w(grid.nodes()[j]) * std::norm(v[j]);
  return std::sqrt(acc);
}

double norm_l1(const HalfLineGrid& grid, const CVec& v) {
  check_size(grid, v);
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) acc += grid.quad_weights()[j] * std::abs(v[j]);
  return acc;
}

double norm_linf(const HalfLineGrid& grid, const CVec& v) {
  check_size(grid, v);
  return refined_sup(grid, [&](int cell, double t, bool on_node) {
    if (on_node) return std::abs(v[cell]);
    return std::abs(cubic_eval(grid, v, cell, t));
  });
}

double norm_pair(const HalfLineGrid& grid, const CVec& phi, double alpha) {
  check_size(grid, phi);
  const CVec dphi = grid.d1_apply(phi);
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j)
    acc += grid.quad_weights()[j] * (std::norm(dphi[j]) + alpha * alpha * std::norm(phi[j]));
  return std::sqrt(acc);
}

double norm_pair_linf(const HalfLineGrid& grid, const CVec& phi, double alpha) {
  check_size(grid, phi);
  const CVec dphi = grid.d1_apply(phi);
  return refined_sup(grid, [&](int cell, double t, bool on_node) {
    if (on_node)
      return std::sqrt(std::norm(dphi[cell]) + alpha * alpha * std::norm(phi[cell]));
    const Complex d = cubic_eval(grid, dphi, cell, t);
    const Complex p = cubic_eval(grid, phi, cell, t);
    return std::sqrt(std::norm(d) + alpha * alpha * std::norm(p));
  });
}

double gevrey_weight(int n, const GevreyNormParams& p) {
  const double na = std::abs(n);
  const double bracket = std::sqrt(1.0 + na * na);
  return (1.0 + std::pow(na, p.d)) * std::exp(p.bigk * std::pow(bracket, p.gamma));
}

double gevrey_norm(const std::map<int, double>& mode_norms, const GevreyNormParams& p) {
  double best = 0.0;
  for (const auto& [n, m] : mode_norms) best = std::max(best, gevrey_weight(n, p) * m);
  return best;
}

InterpolationReport check_interpolation(const HalfLineGrid& grid, const CVec& phi,
                                        const CVec& w, const WeightSpec& rho,
                                        double alpha) {
  check_size(grid, phi);
  check_size(grid, w);
  CVec res = grid.d2_apply(phi) - alpha * alpha * phi - w;
  const double wn = norm_l2(grid, w);
  const double rn = norm_l2(grid, res);
  if (rn > 1e-6 * std::max(1.0, wn))
    throw ConsistencyError("check_interpolation: (phi, w) residual " + std::to_string(rn));

  InterpolationReport rep;
  rep.lhs = norm_pair_linf(grid, phi, alpha);
  const double pair = norm_pair(grid, phi, alpha);
  rep.term_w = std::sqrt(norm_weighted_l2(grid, w, rho)) * std::sqrt(pair);
  CVec one_minus(grid.size());
  for (int j = 0; j < grid.size(); ++j)
    one_minus[j] = (1.0 - std::sqrt(rho(grid.nodes()[j]))) * w[j];
  rep.term_l1 = norm_l1(grid, one_minus);
  rep.term_a = std::sqrt(std::abs(alpha)) * pair;
  const double rhs = rep.term_w + rep.term_l1 + rep.term_a;
  rep.fitted_c = rhs > 0.0 ? rep.lhs / rhs : 0.0;
  return rep;
}

} // namespace blstab
