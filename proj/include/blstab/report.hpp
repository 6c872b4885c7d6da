#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blstab/modal.hpp"

#include <nlohmann/json_fwd.hpp>

namespace blstab {

inline constexpr int kReportSchemaVersion = 1;

// LHS/RHS pair for one displayed inequality; ratio = lhs / rhs_shape with the
// unknown constant stripped from the right-hand side
struct EstimateReport {
  std::string inequality_id;
  double lhs = 0.0;
  double rhs_shape = 0.0;
  double ratio = 0.0;
  int resolution = 0;
  // context snapshot
  double nu = 0.0;
  int n = 0;
  double gamma = 0.0;
  double delta = 0.0;
  Complex mu;
  Complex lambda;
  std::optional<double> time; // set by the semigroup/nonlinear sweeps
  unsigned long long seed = 0;

  static EstimateReport from_context(const std::string& id, const ModeContext& ctx,
                                     int resolution, double lhs, double rhs_shape);
};

nlohmann::json to_json(const EstimateReport& r);
EstimateReport report_from_json(const nlohmann::json& j);

struct SweepSummary {
  std::string inequality_id;
  double sup_ratio = 0.0;
  EstimateReport argmax;
  std::size_t count = 0;

  void absorb(const EstimateReport& r);
};

} // namespace blstab
