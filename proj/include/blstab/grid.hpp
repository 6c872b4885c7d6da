#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace blstab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GridMapping { Algebraic, TruncatedChebyshev };

struct GridParams {
  GridMapping mapping = GridMapping::Algebraic;
  double y_half = 2.0;  // half of the nodes land below this height (algebraic map)
  double length = 40.0; // truncation height L
};

// Chebyshev-Lobatto collocation on [0, L], Y_0 = 0, Y_{N-1} = L.
// The algebraic map Y = a(1+xi)/(b-xi) clusters nodes near the wall; it is the
// truncation of Y = l(1+xi)/(1-xi) to a finite domain.
class HalfLineGrid {
public:
  HalfLineGrid(int n_nodes, const GridParams& params = {});

  int size() const { return static_cast<int>(nodes_.size()); }
  const GridParams& params() const { return params_; }
  const Vec& nodes() const { return nodes_; }
  const Vec& quad_weights() const { return weights_; }
  const Mat& d1() const { return d1_; }
  const Mat& d2() const { return d2_; }
  const Mat& d4() const { return d4_; }
  double d2_condition() const { return d2_cond_; }

  // integral of f over [0, L] against the quadrature weights
  Complex integrate(const CVec& f) const;
  double integrate(const Vec& f) const;

  // sample an arbitrary function on the nodes
  template <class F> CVec sample(F&& f) const {
    CVec out(size());
    for (int j = 0; j < size(); ++j) out[j] = f(nodes_[j]);
    return out;
  }
  template <class F> Vec sample_real(F&& f) const {
    Vec out(size());
    for (int j = 0; j < size(); ++j) out[j] = f(nodes_[j]);
    return out;
  }

  // differentiation applied to complex grid functions
  CVec d1_apply(const CVec& v) const;
  CVec d2_apply(const CVec& v) const;
  Complex deriv_at_wall(const CVec& v) const;

  // barycentric interpolation of grid values at arbitrary Y in [0, L]
  Complex interpolate(const CVec& values, double y) const;

  // nodes inside [0, scale]; the boundary-layer resolution heuristic
  int nodes_below(double scale) const;

private:
  GridParams params_;
  Vec xi_;       // reference nodes, ascending in [-1, 1]
  Vec bary_;     // barycentric weights on xi
  Vec nodes_;    // Y_j ascending
  Vec weights_;  // positive quadrature weights for \int_0^L
  Mat d1_, d2_, d4_;
  double d2_cond_ = 0.0;
};

} // namespace blstab
