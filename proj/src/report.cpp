#include "blstab/report.hpp"

#include <nlohmann/json.hpp>

namespace blstab {

EstimateReport EstimateReport::from_context(const std::string& id, const ModeContext& ctx,
                                            int resolution, double lhs, double rhs_shape) {
  EstimateReport r;
  r.inequality_id = id;
  r.lhs = lhs;
  r.rhs_shape = rhs_shape;
  r.ratio = (lhs == 0.0 && rhs_shape == 0.0) ? 0.0 : lhs / rhs_shape;
  r.resolution = resolution;
  r.nu = ctx.nu;
  r.n = ctx.n;
  r.gamma = ctx.gamma;
  r.delta = ctx.delta;
  r.mu = ctx.mu;
  r.lambda = ctx.lambda;
  return r;
}

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json j{
      {"schema_version", kReportSchemaVersion},
      {"inequality_id", r.inequality_id},
      {"lhs", r.lhs},
      {"rhs_shape", r.rhs_shape},
      {"ratio", r.ratio},
      {"resolution", r.resolution},
      {"params",
       {{"nu", r.nu},
        {"n", r.n},
        {"gamma", r.gamma},
        {"delta", r.delta},
        {"mu_re", r.mu.real()},
        {"mu_im", r.mu.imag()},
        {"lambda_re", r.lambda.real()},
        {"lambda_im", r.lambda.imag()},
        {"seed", r.seed}}}};
  if (r.time) j["params"]["time"] = *r.time;
  return j;
}

EstimateReport report_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", -1) != kReportSchemaVersion)
    throw ConfigError("report: schema version mismatch");
  EstimateReport r;
  r.inequality_id = j.at("inequality_id").get<std::string>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs_shape = j.at("rhs_shape").get<double>();
  r.ratio = j.at("ratio").get<double>();
  r.resolution = j.at("resolution").get<int>();
  const auto& p = j.at("params");
  r.nu = p.at("nu").get<double>();
  r.n = p.at("n").get<int>();
  r.gamma = p.at("gamma").get<double>();
  r.delta = p.at("delta").get<double>();
  r.mu = {p.at("mu_re").get<double>(), p.at("mu_im").get<double>()};
  r.lambda = {p.at("lambda_re").get<double>(), p.at("lambda_im").get<double>()};
  r.seed = p.value("seed", 0ULL);
  if (p.contains("time")) r.time = p.at("time").get<double>();
  return r;
}

void SweepSummary::absorb(const EstimateReport& r) {
  if (count == 0 || r.ratio > sup_ratio) {
    sup_ratio = r.ratio;
    argmax = r;
  }
  inequality_id = r.inequality_id;
  ++count;
}

} // namespace blstab
