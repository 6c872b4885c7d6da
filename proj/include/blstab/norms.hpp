#pragma once

#include <map>
#include <string>

#include "blstab/grid.hpp"

namespace blstab {

// piecewise-linear wall weight: rho(Y) = min(Y/breakpoint, 1)
struct WeightSpec {
  enum class Kind { Rho, RhoLambda, Unit } kind = Kind::Unit;
  double breakpoint = 0.0; // <= 0 means identically one
  double slope = 0.0;

  double operator()(double y) const {
    if (breakpoint <= 0.0) return 1.0;
    return y >= breakpoint ? 1.0 : y * slope;
  }

  // (|n|^{gamma-2/3}/delta)^{-3/2}
  static WeightSpec rho(double n_abs, double gamma, double delta);
  // (|n|^{1/3} lambda_i)^{-3/2}
  static WeightSpec rho_lambda(double n_abs, double lambda_i);
  static WeightSpec unit() { return {}; }
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double norm_l2(const HalfLineGrid& grid, const CVec& v);
double norm_weighted_l2(const HalfLineGrid& grid, const CVec& v, const WeightSpec& w);
double norm_l1(const HalfLineGrid& grid, const CVec& v);
// sup |v| with local cubic refinement between nodes
double norm_linf(const HalfLineGrid& grid, const CVec& v);
// || (d_Y phi, alpha phi) ||_{L^2}, the pair norm of the estimates
double norm_pair(const HalfLineGrid& grid, const CVec& phi, double alpha);
// sup_Y sqrt(|phi'|^2 + |alpha phi|^2) with cubic refinement
double norm_pair_linf(const HalfLineGrid& grid, const CVec& phi, double alpha);

struct GevreyNormParams {
  double d = 0.0;
  double gamma = 1.0;
  double bigk = 1.0;
  enum class Variant { X, X1, Y } variant = Variant::X;
};

// weight (1 + |n|^d) e^{K <n>^gamma}, <n> = sqrt(1 + n^2)
double gevrey_weight(int n, const GevreyNormParams& p);
// sup over modes of weight * mode_norm
double gevrey_norm(const std::map<int, double>& mode_norms, const GevreyNormParams& p);

struct InterpolationReport {
  double lhs = 0.0;     // ||(phi', alpha phi)||_{L^inf}
  double term_w = 0.0;  // ||rho^{1/2} w||^{1/2} ||(phi',alpha phi)||^{1/2}
  double term_l1 = 0.0; // ||(1 - rho^{1/2}) w||_{L^1}
  double term_a = 0.0;  // |alpha|^{1/2} ||(phi',alpha phi)||
  double fitted_c = 0.0;
};

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// the interpolation inequality for (d^2-alpha^2)phi = w, phi(0) = 0
InterpolationReport check_interpolation(const HalfLineGrid& grid, const CVec& phi,
                                        const CVec& w, const WeightSpec& rho,
                                        double alpha);

} // namespace blstab
