#pragma once

#include <filesystem>
#include <iosfwd>

#include "blstab/report.hpp"

namespace blstab {

// scenario configs are versioned json documents; every tolerance, delta and
// seed is config-visible so a run is reproducible from the file alone
inline constexpr int kConfigSchemaVersion = 1;

struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<unsigned long long> seed;
  double resolution_scale = 1.0;
};

// exit codes: 0 pass, 1 acceptance failure, 2 config error, 3 computational failure
int run_scenario(const std::filesystem::path& config_path, const RunOverrides& overrides);

struct AggregateRow {
  std::string inequality_id;
  double sup_ratio = 0.0;
  std::size_t count = 0;
  // ratio drift between consecutive resolutions, percent
  std::vector<std::pair<int, double>> by_resolution;
  double max_drift_percent = 0.0;
};

std::vector<AggregateRow> aggregate(const std::vector<std::filesystem::path>& jsonl_paths);
int run_aggregate(const std::vector<std::filesystem::path>& jsonl_paths,
                  const std::filesystem::path& out_dir);

} // namespace blstab
