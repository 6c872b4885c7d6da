#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace blstab {

struct AiryOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AiryDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AiryMethod { Series, Asymptotic };

struct AirySample {
  std::complex<double> z;
  std::complex<double> ai;
  std::complex<double> ai_prime;
  std::complex<double> a0;
  AiryMethod method;
};

struct AiryPair {
  std::complex<double> ai;
  std::complex<double> ai_prime;
  AiryMethod method;
};

// Ai and Ai' for |z| <= 1e4. Maclaurin series (compensated arithmetic) inside
// |z| = 6, asymptotic branch outside, with the connection rotation in the
// sector where neither expansion of Ai alone is dominant-stable.
AiryPair airy(std::complex<double> z);

// force one branch; throws outside its validity annulus (used for the
// overlap-agreement checks)
AiryPair airy_branch(std::complex<double> z, AiryMethod which);

// A0(z) = int_{e^{i pi/6} z}^{infty} Ai(t) dt, entire in z.
// Evaluated as a tail integral in the decay sector and as 1/3 minus a segment
// integral otherwise.
std::complex<double> a0(std::complex<double> z);

struct RatioBoundReport {
  std::string inequality_id;
  double sup_ratio = 0.0;
  std::complex<double> argmax;
  double fitted_constant = 0.0; // for the Re-bound: fitted c; else sup ratio
  std::size_t n_samples = 0;
};

// ratio checks behind the A0'/A0 bounds: |A0'/A0| vs 1+|z|^{1/2},
// Re A0'/A0 vs min(-1/3, -c(1+|z|^{1/2})), |A0''/A0| vs 1+|z|
std::vector<RatioBoundReport> check_airy_ratio_bounds(
    const std::vector<std::complex<double>>& samples, double sector_height);

} // namespace blstab
