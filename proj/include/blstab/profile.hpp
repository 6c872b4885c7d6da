#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blstab/grid.hpp"

namespace blstab {

struct CatalogueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// V(Y) on the half-line with derivatives up to third order.
// profile_norm is sum_{k=0,1,2} sup (1+Y)^k |d^k V|.
class ShearProfile {
public:
  using Evaluator = std::function<std::array<double, 4>(double)>;

  ShearProfile(std::string name, Evaluator eval, double profile_norm,
               std::optional<double> concavity_m, bool certified = true);

  const std::string& name() const { return name_; }
  std::array<double, 4> eval(double y) const { return eval_(y); }
  double value(double y) const { return eval_(y)[0]; }
  double d1(double y) const { return eval_(y)[1]; }
  double d2(double y) const { return eval_(y)[2]; }
  double d3(double y) const { return eval_(y)[3]; }
  double profile_norm() const { return profile_norm_; }
  std::optional<double> concavity_m() const { return concavity_m_; }
  double delta0() const { return 0.5 / (1.0 + profile_norm_); }
  bool certified() const { return certified_; }

private:
  std::string name_;
  Evaluator eval_;
  double profile_norm_;
  std::optional<double> concavity_m_;
  bool certified_;
};

// catalogue: "exp" (1 - e^{-Y}), "tanh", "erf" (erf(sqrt(pi) Y / 2))
ShearProfile make_builtin_profile(const std::string& name);

// tabulated (Y, V, V', V'', V''') columns with cubic-spline completion;
// flagged uncertified for concavity purposes
ShearProfile load_profile_csv(const std::string& path);

struct ScReport {
  bool pass = false;
  double minimal_m = 0.0;   // grid supremum of the two defining ratios
  double certified_m = 0.0; // minimal_m with the 1% safety margin
  double witness = -1.0;    // node where the condition failed
  std::string reason;
};

// the strong-concavity conditions checked node by node:
// limits V(0)=0, V(inf)=1, monotonicity, -M V'' >= (V')^2 and
// |V'''/V''| + |V''/V'| <= M
ScReport check_sc(const ShearProfile& profile, const std::vector<double>& nodes);

} // namespace blstab
