#include <CLI11.hpp>

#include "blstab/scenario.hpp"

// scenario-driven front end; every verb reads a json config except
// `aggregate`, which merges previously emitted report streams
int main(int argc, char** argv) {
  CLI::App app{"boundary-layer shear flow stability toolkit"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  unsigned long long seed = 0;
  bool seed_set = false;
  double res_scale = 1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario config file")->required();
    sub->add_option("--out", out, "output directory override");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--resolution-scale", res_scale, "multiply grid sizes");
  };

  // verbs share the runner; the verb is a readable alias checked against the
  // config's kind field where it matters
  for (const char* verb : {"check-profile", "solve", "corrector", "sweep", "semigroup",
                           "stokes", "simulate", "airy", "run"})
    add_common(app.add_subcommand(verb));

  auto* agg = app.add_subcommand("aggregate");
  std::vector<std::string> report_paths;
  std::string agg_out = "out";
  agg->add_option("--reports", report_paths, "jsonl report files")->required();
  agg->add_option("--out", agg_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (agg->parsed()) {
    std::vector<std::filesystem::path> paths(report_paths.begin(), report_paths.end());
    return blstab::run_aggregate(paths, agg_out);
  }

  blstab::RunOverrides ov;
  if (!out.empty()) ov.out_dir = out;
  if (seed_set) ov.seed = seed;
  ov.resolution_scale = res_scale;
  return blstab::run_scenario(config, ov);
}
