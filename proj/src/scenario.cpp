#include "blstab/scenario.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "blstab/airy.hpp"
#include "blstab/csvio.hpp"
#include "blstab/nonlinear.hpp"
#include "blstab/resolvent.hpp"
#include "blstab/semigroup.hpp"

namespace blstab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Ctx {
  json cfg;
  fs::path out_dir;
  unsigned long long seed = 1234;
  double res_scale = 1.0;
  bool pass = true;
  json summary;

  void note_check(const std::string& name, bool ok, const json& detail = {}) {
    summary["checks"][name] = {{"pass", ok}};
    if (!detail.is_null()) summary["checks"][name]["detail"] = detail;
    pass = pass && ok;
  }
};

ShearProfile profile_from(const json& cfg) {
  const auto& p = cfg.at("profile");
  if (p.is_string()) return make_builtin_profile(p.get<std::string>());
  if (p.is_object() && p.contains("csv")) return load_profile_csv(p.at("csv"));
  throw ConfigError("profile: expected a catalogue name or {\"csv\": path}");
}

HalfLineGrid grid_from(const json& cfg, double res_scale) {
  GridParams gp;
  int n_nodes = 128;
  if (cfg.contains("numerics")) {
    const auto& n = cfg.at("numerics");
    n_nodes = n.value("n_nodes", 128);
    const std::string mapping = n.value("mapping", "algebraic");
    if (mapping == "algebraic")
      gp.mapping = GridMapping::Algebraic;
    else if (mapping == "truncated-chebyshev")
      gp.mapping = GridMapping::TruncatedChebyshev;
    else
      throw ConfigError("numerics.mapping: unknown mapping " + mapping);
    gp.y_half = n.value("y_half", gp.y_half);
    gp.length = n.value("length", gp.length);
  }
  n_nodes = static_cast<int>(std::lround(n_nodes * res_scale));
  return HalfLineGrid(n_nodes, gp);
}

std::vector<double> number_list(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else if (j.is_object() && j.contains("log_range")) {
    const auto& r = j.at("log_range");
    const double lo = r.at(0).get<double>(), hi = r.at(1).get<double>();
    const int k = r.at(2).get<int>();
    for (int i = 0; i < k; ++i)
      out.push_back(lo * std::pow(hi / lo, k == 1 ? 0.0 : double(i) / (k - 1)));
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw ConfigError("expected a number, list, or {\"log_range\": [lo, hi, count]}");
  }
  return out;
}

void write_jsonl(const fs::path& path, const std::vector<EstimateReport>& reports) {
  std::ofstream out(path);
  for (const auto& r : reports) out << to_json(r).dump() << "\n";
}

// ---- scenario kinds ----

void run_profile_check(Ctx& c) {
  const ShearProfile prof = profile_from(c.cfg);
  const auto& params = c.cfg.value("params", json::object());
  const int pts = params.value("grid_points", 2000);
  const double len = params.value("grid_length", 40.0);
  std::vector<double> nodes(pts);
  for (int i = 0; i < pts; ++i) nodes[i] = len * i / (pts - 1);
  const ScReport rep = check_sc(prof, nodes);
  c.summary["profile"] = {{"name", prof.name()},
                          {"norm", prof.profile_norm()},
                          {"delta0", prof.delta0()},
                          {"certified", prof.certified()}};
  c.summary["sc"] = {{"pass", rep.pass},
                     {"minimal_m", rep.minimal_m},
                     {"certified_m", rep.certified_m},
                     {"witness", rep.witness},
                     {"reason", rep.reason}};
  if (params.contains("expect_pass"))
    c.note_check("sc-expectation", rep.pass == params.at("expect_pass").get<bool>());
}

void run_airy_check(Ctx& c) {
  const auto& params = c.cfg.value("params", json::object());
  const int samples = params.value("samples", 200);
  const double height = params.value("sector_height", 0.1);
  const double radius = params.value("radius", 30.0);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ur(0.05, radius);
  std::uniform_real_distribution<double> ua(-M_PI, M_PI);
  std::vector<Complex> zs;
  while (static_cast<int>(zs.size()) < samples) {
    const Complex z = std::polar(ur(rng), ua(rng));
    if (z.imag() <= height) zs.push_back(z);
  }
  const auto reports = check_airy_ratio_bounds(zs, height);
  for (const auto& r : reports) {
    c.summary["ratio_bounds"][r.inequality_id] = {
        {"sup_ratio", r.sup_ratio},
        {"fitted_constant", r.fitted_constant},
        {"argmax", {r.argmax.real(), r.argmax.imag()}},
        {"samples", r.n_samples}};
  }
  const AiryPair at0 = airy(0.0);
  c.note_check("airy-at-0", std::abs(at0.ai - 0.35502805388781723926) < 1e-12);
  c.note_check("a0-at-0", std::abs(a0(0.0) - 1.0 / 3.0) < 1e-10);
  c.note_check("re-ratio-bound", reports[1].sup_ratio <= -1.0 / 3.0 + 1e-9);
}

ModeContext context_from(const json& p, const ShearProfile& prof, double nu, int n) {
  const double gamma = p.value("gamma", 2.0 / 3.0);
  DeltaFamily deltas = DeltaFamily::defaults(prof);
  const double delta = p.value("delta", deltas.delta_star);
  if (p.contains("lambda")) {
    const Complex lam(p.at("lambda").at(0).get<double>(),
                      p.at("lambda").at(1).get<double>());
    return ModeContext::from_lambda(prof, nu, n, lam, gamma, delta, deltas);
  }
  if (p.contains("mu")) {
    const Complex mu(p.at("mu").at(0).get<double>(), p.at("mu").at(1).get<double>());
    return ModeContext::from_mu(prof, nu, n, mu, gamma, delta, deltas);
  }
  // on the l0 line by default
  const double re = std::sqrt(nu) * std::pow(std::abs(n), gamma) / delta;
  const double im_f = p.value("im_mu_factor", 0.0);
  return ModeContext::from_mu(prof, nu, n, Complex(re, im_f * re), gamma, delta, deltas);
}

void run_os_solve(Ctx& c) {
  const ShearProfile prof = profile_from(c.cfg);
  const HalfLineGrid grid = grid_from(c.cfg, c.res_scale);
  const auto& p = c.cfg.at("params");
  const double nu = p.at("nu").get<double>();
  const int n = p.at("n").get<int>();
  ModeContext ctx = context_from(p, prof, nu, n);
  ctx.exploratory = p.value("exploratory", false);
  if (!ctx.exploratory && !ctx.resolvent_admissible())
    throw ConfigError("os-solve: context violates the admissibility line; "
                      "set exploratory=true to proceed");
  std::mt19937_64 rng(c.seed);
  CVec f1 = random_decaying(grid, rng, 0);
  CVec f2 = random_decaying(grid, rng, 0);
  const RhsSpec rhs = RhsSpec::pair(f1, f2);
  const std::string bc = p.value("bc", "nonslip");
  const OSSolution s = (bc == "navier") ? solve_os_navier(prof, ctx, rhs, grid)
                                        : solve_os_nonslip(prof, ctx, rhs, grid);
  write_grid_function_csv(c.out_dir / "solution.csv", grid,
                          {{"phi", s.phi}, {"w", s.w}});
  c.summary["solution"] = {{"pair_norm", s.pair_norm},
                           {"w_norm", s.w_norm},
                           {"residual", s.residual_norm},
                           {"bc", bc}};
  c.note_check("residual-small", s.residual_norm <= 1e-6 * std::max(1.0, s.w_norm));
}

void run_corrector(Ctx& c) {
  const ShearProfile prof = profile_from(c.cfg);
  const HalfLineGrid grid = grid_from(c.cfg, c.res_scale);
  const auto& p = c.cfg.at("params");
  const ModeContext ctx = context_from(p, prof, p.at("nu").get<double>(),
                                       p.at("n").get<int>());
  const CorrectorBundle cb = build_corrector(prof, ctx, grid);
  write_grid_function_csv(c.out_dir / "corrector.csv", grid,
                          {{"Wa", cb.w_airy},
                           {"We", cb.w_err},
                           {"Wb", cb.w_b},
                           {"Phib", cb.phi_b}});
  c.summary["corrector"] = {{"J", {cb.j.real(), cb.j.imag()}},
                            {"J_times_A", std::abs(cb.j) * ctx.scale_a},
                            {"J_quadrature_gap", cb.j_quadrature_gap},
                            {"scale_A", ctx.scale_a}};
  c.note_check("J-identity", cb.j_quadrature_gap <= 1e-8 * std::max(1.0, std::abs(cb.j)));
}

void run_resolvent_sweep(Ctx& c) {
  const ShearProfile prof = profile_from(c.cfg);
  const HalfLineGrid grid = grid_from(c.cfg, c.res_scale);
  const auto& p = c.cfg.at("params");
  std::vector<std::string> ids;
  if (!p.contains("ids") || (p.at("ids").is_string() && p.at("ids") == "all")) {
    ids = inequality_ids();
  } else {
    for (const auto& s : p.at("ids")) ids.push_back(s.get<std::string>());
  }
  const int draws = p.value("draws", 5);
  std::vector<ModeContext> sweep;
  for (double nu : number_list(p.at("nu"))) {
    for (double nd : number_list(p.at("n"))) {
      const int n = static_cast<int>(std::lround(nd));
      json q = p;
      if (p.contains("im_mu_factors")) {
        for (const auto& f : p.at("im_mu_factors")) {
          q["im_mu_factor"] = f.get<double>();
          sweep.push_back(context_from(q, prof, nu, n));
        }
      } else {
        sweep.push_back(context_from(q, prof, nu, n));
      }
    }
  }
  std::vector<EstimateReport> all;
  for (const auto& id : ids) {
    const SweepResult res = verify_inequality(id, prof, sweep, grid, draws, c.seed);
    all.insert(all.end(), res.reports.begin(), res.reports.end());
    json rejects = json::array();
    for (const auto& rej : res.rejected)
      rejects.push_back({{"index", rej.sweep_index}, {"clause", rej.clause}});
    c.summary["sweeps"][id] = {{"sup_ratio", res.summary.sup_ratio},
                               {"count", res.summary.count},
                               {"rejected", rejects}};
    c.note_check("finite-" + id,
                 res.summary.count > 0 && std::isfinite(res.summary.sup_ratio));
  }
  write_jsonl(c.out_dir / "reports.jsonl", all);
}

void run_semigroup_check(Ctx& c) {
  const ShearProfile prof = profile_from(c.cfg);
  const HalfLineGrid grid = grid_from(c.cfg, c.res_scale);
  const auto& p = c.cfg.at("params");
  std::vector<SemigroupSweepPoint> pts;
  for (const auto& q : p.at("points")) {
    SemigroupSweepPoint pt;
    pt.nu = q.at("nu").get<double>();
    pt.n = q.at("n").get<int>();
    pt.gamma = q.value("gamma", 2.0 / 3.0);
    pt.delta = q.value("delta", DeltaFamily::defaults(prof).delta_star);
    pts.push_back(pt);
  }
  std::vector<double> times;
  for (const auto& t : p.at("times")) times.push_back(t.get<double>());
  const auto reports =
      verify_semigroup_bounds(prof, pts, times, p.value("draws", 2), grid, c.seed);
  write_jsonl(c.out_dir / "reports.jsonl", reports);
  std::map<std::string, SweepSummary> sums;
  for (const auto& r : reports) sums[r.inequality_id].absorb(r);
  for (const auto& [id, s] : sums) {
    c.summary["sweeps"][id] = {{"sup_ratio", s.sup_ratio}, {"count", s.count}};
    c.note_check("finite-" + id, std::isfinite(s.sup_ratio));
  }

  if (p.contains("cross_check")) {
    const auto& cc = p.at("cross_check");
    const auto& q = p.at("points").at(0);
    const double nu = q.at("nu").get<double>();
    const int n = q.at("n").get<int>();
    const double tau_f = cc.value("tau_factor", 2.0);
    const double tau = tau_f / (std::sqrt(nu) * n);
    const double delta_cv =
        conditioning_delta(nu, n, q.value("gamma", 2.0 / 3.0), tau);
    ModeContext ctx = ModeContext::from_mu(
        prof, nu, n,
        Complex(std::sqrt(nu) * std::pow(n, q.value("gamma", 2.0 / 3.0)) / delta_cv, 0.0),
        q.value("gamma", 2.0 / 3.0), delta_cv, DeltaFamily::defaults(prof));
    ModeEvolution evo(prof, ctx, grid);
    std::mt19937_64 rng(c.seed);
    const CVec psi0 = random_decaying(grid, rng, 2);
    const CVec a_exp = evo.apply_expm(psi0, tau);
    const CVec a_con = evo.apply_contour(psi0, tau, M_PI / 2 + 0.1);
    const CVec a_ts = evo.apply_timestep(psi0, tau, cc.value("nsteps", 0));
    const double ref = norm_pair(grid, a_exp, ctx.alpha);
    const double d1 = norm_pair(grid, (a_con - a_exp).eval(), ctx.alpha) / ref;
    const double d2 = norm_pair(grid, (a_ts - a_exp).eval(), ctx.alpha) / ref;
    c.summary["cross_check"] = {{"contour_vs_expm", d1}, {"timestep_vs_expm", d2}};
    const double tol = cc.value("tolerance", 1e-6);
    c.note_check("cross-check", d1 <= tol && d2 <= tol);
    const VelocityMode snap = evo.velocity_of(a_exp);
    write_grid_function_csv(c.out_dir / "velocity.csv", grid,
                            {{"v1", snap.v1}, {"v2", snap.v2}});
  }
}

void run_stokes_check(Ctx& c) {
  const HalfLineGrid grid = grid_from(c.cfg, c.res_scale);
  const auto& p = c.cfg.at("params");
  const double nu = p.at("nu").get<double>();
  const int n = p.at("n").get<int>();
  std::vector<double> times;
  for (const auto& t : p.at("times")) times.push_back(t.get<double>());
  std::mt19937_64 rng(c.seed);
  const CVec psi0 = random_decaying(grid, rng, 2);
  const Complex in(0.0, static_cast<double>(n));
  const VelocityMode f{-grid.d1_apply(psi0), in * psi0};
  const StokesReport rep = check_stokes(grid, nu, n, f, times);
  write_jsonl(c.out_dir / "reports.jsonl", rep.displays);
  c.summary["stokes"] = {{"energy_identity_gap", rep.energy_identity_gap},
                         {"projected", rep.projected}};
  c.note_check("energy-identity", rep.energy_identity_gap <= 1e-8);
}

void run_nonlinear_sim(Ctx& c) {
  const ShearProfile prof = profile_from(c.cfg);
  const HalfLineGrid grid = grid_from(c.cfg, c.res_scale);
  const auto& p = c.cfg.at("params");
  const double nu = p.at("nu").get<double>();
  const double gamma = p.value("gamma", 0.75);
  const double d = p.value("d", 5.0 - 3.0 * gamma + 0.5);
  const ZNormParams zp = ZNormParams::make(gamma, p.value("K", 0.5), p.value("T", 1.0), d,
                                           p.value("delta", 0.5));
  const double eps = p.value("epsilon", 1e-2);
  const double amplitude = eps * std::pow(nu, 0.5 + zp.beta);
  SimState a;
  if (p.contains("initial") && p.at("initial").contains("csv")) {
    a = load_state_csv(p.at("initial").at("csv").get<std::string>(), grid, nu);
  } else {
    a = gevrey_initial_data(grid, nu, p.value("n_max", 16), p.value("n_active", 4), zp,
                            amplitude, c.seed);
  }
  SimOptions opts;
  opts.save_every = p.value("save_every", 8);
  const SimResult res = simulate(prof, a, zp, grid, opts);
  write_state_csv(c.out_dir / "final_state.csv", grid, res.final_state);
  std::ofstream hist(c.out_dir / "history.csv");
  hist.precision(17);
  hist << "t,x_norm,y_norm,grad_norm,z_norm,l2,grad_l2\n";
  for (const auto& h : res.history)
    hist << h.t << "," << h.x_norm << "," << h.y_norm << "," << h.grad_norm << ","
         << h.z_norm << "," << h.l2 << "," << h.grad_l2 << "\n";
  const double z_final = res.history.back().z_norm;
  c.summary["simulation"] = {{"a_x1_norm", res.a_x1_norm},
                             {"beta", zp.beta},
                             {"amplitude", amplitude},
                             {"z_sup", z_final},
                             {"fitted_C", z_final / res.a_x1_norm},
                             {"t_end", res.history.back().t},
                             {"early_stop", res.early_stop}};
  c.note_check("bounded", !res.early_stop);
}

} // namespace

int run_scenario(const fs::path& config_path, const RunOverrides& overrides) {
  Ctx c;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << "\n";
      return 2;
    }
    c.cfg = json::parse(in);
    if (c.cfg.value("schema_version", 1) != kConfigSchemaVersion)
      throw ConfigError("config: schema version mismatch");
    if (!c.cfg.contains("kind")) throw ConfigError("config: missing 'kind'");
    c.seed = overrides.seed.value_or(c.cfg.value("seed", 1234ULL));
    c.res_scale = overrides.resolution_scale;
    fs::path out = overrides.out_dir.value_or(
        fs::path(c.cfg.value("output", json::object()).value("dir", "out")));
    fs::create_directories(out);
    c.out_dir = out;
    c.summary["kind"] = c.cfg.at("kind");
    c.summary["seed"] = c.seed;
    c.summary["schema_version"] = kReportSchemaVersion;
  } catch (const json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const std::string kind = c.cfg.at("kind").get<std::string>();
    if (kind == "profile-check")
      run_profile_check(c);
    else if (kind == "airy-check")
      run_airy_check(c);
    else if (kind == "os-solve")
      run_os_solve(c);
    else if (kind == "corrector")
      run_corrector(c);
    else if (kind == "resolvent-sweep")
      run_resolvent_sweep(c);
    else if (kind == "semigroup-check")
      run_semigroup_check(c);
    else if (kind == "stokes-check")
      run_stokes_check(c);
    else if (kind == "nonlinear-sim")
      run_nonlinear_sim(c);
    else
      throw ConfigError("config: unknown kind '" + kind + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config field error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    c.summary["failure"] = e.what();
    std::ofstream(c.out_dir / "summary.json") << c.summary.dump(2) << "\n";
    std::cerr << "computational failure: " << e.what() << "\n";
    return 3;
  }

  std::ofstream(c.out_dir / "summary.json") << c.summary.dump(2) << "\n";
  return c.pass ? 0 : 1;
}

std::vector<AggregateRow> aggregate(const std::vector<fs::path>& jsonl_paths) {
  std::map<std::string, std::map<int, double>> sup_by_res;
  std::map<std::string, std::size_t> counts;
  for (const auto& path : jsonl_paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("aggregate: cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const EstimateReport r = report_from_json(nlohmann::json::parse(line));
      auto& m = sup_by_res[r.inequality_id];
      m[r.resolution] = std::max(m[r.resolution], r.ratio);
      counts[r.inequality_id]++;
    }
  }
  std::vector<AggregateRow> rows;
  for (const auto& [id, m] : sup_by_res) {
    AggregateRow row;
    row.inequality_id = id;
    row.count = counts[id];
    double prev = -1.0;
    for (const auto& [res, sup] : m) {
      row.sup_ratio = std::max(row.sup_ratio, sup);
      row.by_resolution.emplace_back(res, sup);
      if (prev > 0.0)
        row.max_drift_percent =
            std::max(row.max_drift_percent, 100.0 * std::abs(sup - prev) / prev);
      prev = sup;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_aggregate(const std::vector<fs::path>& jsonl_paths, const fs::path& out_dir) {
  try {
    const auto rows = aggregate(jsonl_paths);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row{{"inequality_id", r.inequality_id},
                         {"sup_ratio", r.sup_ratio},
                         {"count", r.count},
                         {"max_drift_percent", r.max_drift_percent}};
      for (const auto& [res, sup] : r.by_resolution)
        row["by_resolution"][std::to_string(res)] = sup;
      j.push_back(row);
    }
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "aggregate.json") << j.dump(2) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "aggregate error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "aggregate failure: " << e.what() << "\n";
    return 3;
  }
}

} // namespace blstab
