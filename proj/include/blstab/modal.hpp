#pragma once

#include <string>
#include <vector>

#include "blstab/grid.hpp"
#include "blstab/profile.hpp"

namespace blstab {

struct DeltaFamily {
  double delta0 = 0.0; // from the profile
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta_star = 0.0;

  static DeltaFamily defaults(const ShearProfile& profile) {
    DeltaFamily d;
    d.delta0 = profile.delta0();
    d.delta1 = d.delta0 / 4.0;
    d.delta2 = d.delta0 / 4.0;
    d.delta_star = d.delta1 / 4.0;
    return d;
  }
};

// one Fourier-mode parameter bundle; mu and lambda = i mu / (|n| sqrt(nu))
// carry the same information
struct ModeContext {
  double nu = 0.0;
  int n = 0;
  double alpha = 0.0;      // nu^{1/2} |n|
  Complex mu;
  Complex lambda;          // i mu / (|n| nu^{1/2})
  Complex lambda_nu;       // lambda + i nu^{1/2} alpha
  double gamma = 2.0 / 3.0;
  double delta = 0.0;      // the slack in Re mu >= nu^{1/2}|n|^gamma / delta
  DeltaFamily deltas;
  double scale_a = 0.0;    // |n|^{1/3} (1 + |n|^{1/3} |lambda_nu|)^{1/2}
  Complex d_shift;         // -lambda_nu / V'(0)
  bool exploratory = false;

  double lambda_r() const { return lambda.real(); }
  double lambda_i() const { return lambda.imag(); }
  // signed quantities entering the mode equation for n < 0
  double beta() const { return n < 0 ? -alpha : alpha; }
  Complex lambda_signed() const { return n < 0 ? -lambda : lambda; }

  static ModeContext from_mu(const ShearProfile& profile, double nu, int n, Complex mu,
                             double gamma, double delta, const DeltaFamily& deltas);
  static ModeContext from_lambda(const ShearProfile& profile, double nu, int n,
                                 Complex lambda, double gamma, double delta,
                                 const DeltaFamily& deltas);

  // Re mu = alpha lambda_i >= nu^{1/2} |n|^gamma / delta
  bool resolvent_admissible() const;
};

enum class FrequencyRegime { Low, MiddleSmall, MiddleLarge, High };

struct RegimeTag {
  FrequencyRegime frequency;
  std::vector<std::string> spectral; // subset of {S-sector, O-disc-line, Im-large}
};

std::string to_string(FrequencyRegime r);

// thresholds |n| <= 1/delta0 (low), <= nu^{-3/4}/delta0 (middle, split by
// |n|^gamma nu^{1/2} < 1), beyond that high; ties go to the lower regime
FrequencyRegime classify(const ShearProfile& profile, double nu, int n, double gamma);

// membership in S_{nu,n}(theta), O_{nu,n} and the large-Re(mu) region
std::vector<std::string> in_resolvent_region(const ModeContext& ctx, double theta);

} // namespace blstab
