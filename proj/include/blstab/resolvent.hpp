#pragma once

#include <random>

#include "blstab/ossolve.hpp"
#include "blstab/report.hpp"

namespace blstab {

enum class ResolventNormKind { L2ToL2, L2ToGradient, L2ToWeightedCurl };

// operator norm of f = (f1,f2) -> solution functional, as the largest
// singular value of the quadrature-weighted discrete solution map
double resolvent_norm(const ShearProfile& profile, const ModeContext& ctx,
                      const HalfLineGrid& grid, ResolventNormKind which);

// lower bound on the same norm from randomized unit right-hand sides
double resolvent_norm_randomized(const ShearProfile& profile, const ModeContext& ctx,
                                 const HalfLineGrid& grid, ResolventNormKind which,
                                 int draws, std::mt19937_64& rng);

inline const std::vector<std::string>& inequality_ids() {
  static const std::vector<std::string> ids = {
      "lambda-large-L2",        // ||(phi',a phi)|| <= C/|a lambda| ||f||
      "lambda-large-Linfinity", // ||w|| <= C/(nu^{1/4}|a lambda|^{1/2}) ||f||
      "ieq-Immu-large1",        // ||phi'||+a||phi|| <= C/(a li + nu^{1/2}a^2) ||f||
      "ieq-Immu-large2",        // ||w|| <= C/(nu^{1/4}(a li + nu^{1/2}a^2)^{1/2}) ||f||
      "navier-slip-resolvent",  // nu^{1/4}a^{1/2}li^{-1/2}||w|| + a li ||pair|| <= C li^{-1}||F||
      "weighted-w2",            // the V'-weighted bounds of the w2 subproblem
      "rayleigh-trick-first",   // concavity lower bound, free lambda_r
      "rayleigh-trick-second",  // same with lambda_r >= 1
      "rayleigh-solve",         // ||pair|| <= C(li^{-1}||h1|| + li^{-2}||(h2,h3)||)
      "corrector-error",        // W_e bounds against a li^{-1} A^{-7/2}
      "corrector-norms",        // (pair Phi, ||W||, ||rho_l^{1/2} W||) vs A powers
      "corrector-J",            // |J| >= c A^{-1}
      "corrector-Wb",           // normalized corrector norms vs A powers
      "nonslip-resolvent",      // the three nonslip bounds
  };
  return ids;
}

struct HypothesisViolation {
  std::size_t sweep_index;
  std::string clause;
};

struct SweepResult {
  std::vector<EstimateReport> reports;
  SweepSummary summary;
  std::vector<HypothesisViolation> rejected;
};

// runs one displayed inequality over a parameter sweep; randomized data use
// `draws` unit-norm right-hand sides per context
SweepResult verify_inequality(const std::string& inequality_id,
                              const ShearProfile& profile,
                              const std::vector<ModeContext>& sweep,
                              const HalfLineGrid& grid, int draws = 5,
                              unsigned long long seed = 1234);

// smooth decaying random grid functions for sweeps and tests
CVec random_decaying(const HalfLineGrid& grid, std::mt19937_64& rng, int wall_order = 0);

} // namespace blstab
