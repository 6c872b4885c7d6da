#include "blstab/profile.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <fstream>
#include <sstream>

namespace blstab {

ShearProfile::ShearProfile(std::string name, Evaluator eval, double profile_norm,
                           std::optional<double> concavity_m, bool certified)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      profile_norm_(profile_norm),
      concavity_m_(concavity_m),
      certified_(certified) {}

namespace {

// maximize (1+Y)^k |d^k V| on a refined grid; catalogued profiles decay fast
// enough past Y = 40 that the tail contributes nothing at double precision
double weighted_sup(const ShearProfile::Evaluator& eval, int k, double length = 40.0) {
  double best = 0.0;
  const int n = 4000;
  for (int j = 0; j <= n; ++j) {
    const double y = length * j / n;
    const double v = std::pow(1.0 + y, k) * std::abs(eval(y)[static_cast<size_t>(k)]);
    best = std::max(best, v);
  }
  return best;
}

double norm_of(const ShearProfile::Evaluator& eval) {
  return weighted_sup(eval, 0) + weighted_sup(eval, 1) + weighted_sup(eval, 2);
}

} // namespace

ShearProfile make_builtin_profile(const std::string& name) {
  if (name == "exp") {
    auto eval = [](double y) -> std::array<double, 4> {
      const double e = std::exp(-y);
      return {1.0 - e, e, -e, e};
    };
    // sup(1-e^{-Y}) = 1, sup(1+Y)e^{-Y} = 1, sup(1+Y)^2 e^{-Y} = 4/e
    const double norm = 2.0 + 4.0 / std::exp(1.0);
    return ShearProfile("exp", eval, norm, 2.0);
  }
  if (name == "tanh") {
    auto eval = [](double y) -> std::array<double, 4> {
      const double t = std::tanh(y);
      const double s2 = 1.0 - t * t;
      return {t, s2, -2.0 * s2 * t, 4.0 * s2 * t * t - 2.0 * s2 * s2};
    };
    return ShearProfile("tanh", eval, norm_of([](double y) -> std::array<double, 4> {
                          const double t = std::tanh(y);
                          const double s2 = 1.0 - t * t;
                          return {t, s2, -2.0 * s2 * t, 4.0 * s2 * t * t - 2.0 * s2 * s2};
                        }),
                        std::nullopt);
  }
  if (name == "erf") {
    // V = erf(c Y) with c = sqrt(pi)/2, so V'(0) = 1
    const double c = std::sqrt(M_PI) / 2.0;
    auto eval = [c](double y) -> std::array<double, 4> {
      const double g = std::exp(-c * c * y * y);
      const double d1 = 2.0 * c / std::sqrt(M_PI) * g;
      const double d2 = -2.0 * c * c * y * d1;
      const double d3 = (4.0 * c * c * c * c * y * y - 2.0 * c * c) * d1;
      return {std::erf(c * y), d1, d2, d3};
    };
    return ShearProfile("erf", eval, norm_of(eval), std::nullopt);
  }
  throw CatalogueError("unknown profile '" + name + "' (catalogue: exp, tanh, erf)");
}

namespace {

// natural cubic spline through (x_i, y_i)
struct Spline {
  std::vector<double> x, y, m; // second derivatives at knots

  void build() {
    const int n = static_cast<int>(x.size());
    m.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    b[0] = b[n - 1] = 1.0;
    for (int i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m[n - 1] = d[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
  }

  double eval(double t) const {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    int lo = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
    const double h = x[lo + 1] - x[lo];
    const double u = (x[lo + 1] - t) / h, v = (t - x[lo]) / h;
    return u * y[lo] + v * y[lo + 1] +
           ((u * u * u - u) * m[lo] + (v * v * v - v) * m[lo + 1]) * h * h / 6.0;
  }
};

} // namespace

ShearProfile load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file " + path);
  auto splines = std::make_shared<std::array<Spline, 4>>();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != 5) throw ConfigError("profile CSV needs Y,V,V',V'',V''' columns");
    for (int k = 0; k < 4; ++k) {
      (*splines)[static_cast<size_t>(k)].x.push_back(row[0]);
      (*splines)[static_cast<size_t>(k)].y.push_back(row[static_cast<size_t>(k) + 1]);
    }
  }
  for (auto& s : *splines) {
    if (s.x.size() < 4) throw ConfigError("profile CSV: too few rows");
    s.build();
  }
  auto eval = [splines](double y) -> std::array<double, 4> {
    return {(*splines)[0].eval(y), (*splines)[1].eval(y), (*splines)[2].eval(y),
            (*splines)[3].eval(y)};
  };
  return ShearProfile(path, eval, norm_of(eval), std::nullopt, /*certified=*/false);
}

ScReport check_sc(const ShearProfile& profile, const std::vector<double>& nodes) {
  ScReport rep;
  double ratio1 = 0.0, ratio2 = 0.0;
  double prev_v = -1e300;
  for (double y : nodes) {
    const auto d = profile.eval(y);
    if (y == 0.0 && std::abs(d[0]) > 1e-10) {
      rep.reason = "V(0) != 0";
      rep.witness = y;
      return rep;
    }
    if (d[0] < prev_v - 1e-12) {
      rep.reason = "V not monotone";
      rep.witness = y;
      return rep;
    }
    prev_v = d[0];
    const double vp2 = d[1] * d[1];
    if (d[2] >= 0.0) {
      if (vp2 > 1e-24) {
        rep.reason = "V'' vanishing with V' != 0";
        rep.witness = y;
        return rep;
      }
    } else {
      ratio1 = std::max(ratio1, vp2 / (-d[2]));
    }
    if (std::abs(d[2]) > 1e-300 && std::abs(d[1]) > 1e-300)
      ratio2 = std::max(ratio2, std::abs(d[3] / d[2]) + std::abs(d[2] / d[1]));
  }
  const double y_max = *std::max_element(nodes.begin(), nodes.end());
  if (y_max > 0.0 && std::abs(profile.value(y_max) - 1.0) > 1e-6) {
    rep.reason = "V does not reach 1 at the grid edge";
    rep.witness = y_max;
    return rep;
  }
  rep.pass = true;
  rep.minimal_m = std::max(ratio1, ratio2);
  rep.certified_m = 1.01 * rep.minimal_m;
  return rep;
}

} // namespace blstab
