#include "blstab/grid.hpp"

#include <cmath>

namespace blstab {

namespace {

// Clenshaw-Curtis weights on [-1, 1] for Lobatto nodes xi_j = -cos(pi j / n)
Vec clenshaw_curtis(int n_nodes) {
  const int n = n_nodes - 1;
  Vec w(n_nodes);
  for (int k = 0; k <= n; ++k) {
    const double theta = M_PI * k / n;
    double s = 0.0;
    for (int m = 1; m <= n / 2; ++m) {
      const double bm = (2 * m == n) ? 1.0 : 2.0;
      s += bm / (4.0 * m * m - 1.0) * std::cos(2.0 * m * theta);
    }
    const double c = (k == 0 || k == n) ? 1.0 : 2.0;
    w[k] = c / n * (1.0 - s);
  }
  return w;
}

} // namespace

HalfLineGrid::HalfLineGrid(int n_nodes, const GridParams& params) : params_(params) {
  if (n_nodes < 16) throw ConfigError("grid: need at least 16 nodes");
  if (params.length <= 0.0) throw ConfigError("grid: nonpositive truncation length");
  if (params.mapping == GridMapping::Algebraic &&
      (params.y_half <= 0.0 || 2.0 * params.y_half >= params.length))
    throw ConfigError("grid: algebraic map needs 0 < y_half < length/2");

  const int N = n_nodes;
  const int n = N - 1;
  xi_.resize(N);
  bary_.resize(N);
  for (int j = 0; j < N; ++j) {
    xi_[j] = -std::cos(M_PI * j / n);
    bary_[j] = (j % 2 == 0) ? 1.0 : -1.0;
  }
  bary_[0] *= 0.5;
  bary_[n] *= 0.5;

  Vec yp(N), ypp(N);
  nodes_.resize(N);
  const double L = params.length;
  if (params.mapping == GridMapping::Algebraic) {
    const double a = params.y_half * L / (L - 2.0 * params.y_half);
    const double b = 1.0 + 2.0 * a / L;
    for (int j = 0; j < N; ++j) {
      nodes_[j] = a * (1.0 + xi_[j]) / (b - xi_[j]);
      yp[j] = a * (b + 1.0) / ((b - xi_[j]) * (b - xi_[j]));
      ypp[j] = 2.0 * a * (b + 1.0) / std::pow(b - xi_[j], 3);
    }
  } else {
    for (int j = 0; j < N; ++j) {
      nodes_[j] = L * (1.0 + xi_[j]) / 2.0;
      yp[j] = L / 2.0;
      ypp[j] = 0.0;
    }
  }
  nodes_[0] = 0.0;
  nodes_[n] = L;

  // reference differentiation matrix from barycentric weights
  Mat D(N, N);
  for (int i = 0; i < N; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      D(i, j) = (bary_[j] / bary_[i]) / (xi_[i] - xi_[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }

  Vec xip = yp.cwiseInverse();
  Vec xipp(N);
  for (int j = 0; j < N; ++j) xipp[j] = -ypp[j] / std::pow(yp[j], 3);
  d1_ = xip.asDiagonal() * D;
  d2_ = (xip.cwiseProduct(xip)).asDiagonal() * (D * D) + xipp.asDiagonal() * D;
  d4_ = d2_ * d2_;

  weights_ = clenshaw_curtis(N).cwiseProduct(yp);

  Eigen::JacobiSVD<Mat> svd(d2_);
  const auto& sv = svd.singularValues();
  d2_cond_ = sv(0) / sv(sv.size() - 1);
}

Complex HalfLineGrid::integrate(const CVec& f) const {
  return (weights_.cast<Complex>().cwiseProduct(f)).sum();
}

CVec HalfLineGrid::d1_apply(const CVec& v) const {
  return (d1_ * v.real()).cast<Complex>() + Complex(0, 1) * (d1_ * v.imag()).cast<Complex>();
}

CVec HalfLineGrid::d2_apply(const CVec& v) const {
  return (d2_ * v.real()).cast<Complex>() + Complex(0, 1) * (d2_ * v.imag()).cast<Complex>();
}

Complex HalfLineGrid::deriv_at_wall(const CVec& v) const {
  return {d1_.row(0).dot(v.real()), d1_.row(0).dot(v.imag())};
}

double HalfLineGrid::integrate(const Vec& f) const {
  return weights_.dot(f);
}

Complex HalfLineGrid::interpolate(const CVec& values, double y) const {
  // invert the map, then barycentric formula on xi
  double xi;
  const double L = params_.length;
  if (params_.mapping == GridMapping::Algebraic) {
    const double a = params_.y_half * L / (L - 2.0 * params_.y_half);
    const double b = 1.0 + 2.0 * a / L;
    xi = (b * y - a) / (y + a);
  } else {
    xi = 2.0 * y / L - 1.0;
  }
  Complex num = 0.0, den = 0.0;
  for (int j = 0; j < size(); ++j) {
    const double dx = xi - xi_[j];
    if (std::abs(dx) < 1e-14) return values[j];
    const double c = bary_[j] / dx;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

int HalfLineGrid::nodes_below(double scale) const {
  int count = 0;
  for (int j = 0; j < size(); ++j)
    if (nodes_[j] <= scale) ++count;
  return count;
}

} // namespace blstab
