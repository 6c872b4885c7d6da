#include "blstab/resolvent.hpp"

#include <cmath>

namespace blstab {

namespace {

// discrete nonslip solution map: rhs function values at interior nodes -> [phi; w]
CMat solution_map(const ShearProfile& profile, const ModeContext& ctx,
                  const HalfLineGrid& grid) {
  const int N = grid.size();
  const Complex ia(0.0, ctx.beta());
  const Complex lam = ctx.lambda_signed();
  const double alpha = ctx.alpha;
  const double rootnu = std::sqrt(ctx.nu);
  CMat a = CMat::Zero(2 * N, 2 * N);
  int r = 0;
  a(r++, 0) = 1.0;
  for (int j = 0; j < N; ++j) a(r, j) = grid.d1()(0, j);
  ++r;
  a(r++, N - 1) = 1.0;
  for (int j = 0; j < N; ++j) a(r, j) = grid.d1()(N - 1, j);
  ++r;
  for (int j = 1; j < N - 1; ++j) {
    for (int k = 0; k < N; ++k) a(r, k) = grid.d2()(j, k);
    a(r, j) -= alpha * alpha;
    a(r, N + j) = -1.0;
    ++r;
  }
  const int first_dyn = r;
  for (int j = 1; j < N - 1; ++j) {
    for (int k = 0; k < N; ++k) a(r, N + k) = -rootnu * grid.d2()(j, k);
    a(r, N + j) += rootnu * alpha * alpha;
    a(r, N + j) += ia * (profile.value(grid.nodes()[j]) - lam);
    a(r, j) = -ia * profile.d2(grid.nodes()[j]);
    ++r;
  }
  Vec row_scale(2 * N);
  for (int i = 0; i < 2 * N; ++i) {
    const double r = a.row(i).cwiseAbs().maxCoeff();
    row_scale[i] = r > 0.0 ? 1.0 / r : 1.0;
    a.row(i) *= row_scale[i];
  }
  Eigen::PartialPivLU<CMat> lu(a);
  if (lu.rcond() < 1e-12) {
    Eigen::JacobiSVD<CMat> svd(a);
    throw NearSingularError("resolvent_norm: nearly singular system",
                            svd.singularValues()(svd.singularValues().size() - 1));
  }
  CMat rhs_cols = CMat::Zero(2 * N, N - 2);
  for (int j = 0; j < N - 2; ++j) rhs_cols(first_dyn + j, j) = row_scale[first_dyn + j];
  return lu.solve(rhs_cols); // 2N x (N-2)
}

// solenoidal inputs are parametrized by a potential chi with chi(0) = 0 and
// decay: f = (-chi', i beta chi), ||f|| = ||(chi', beta chi)||; the curl of f
// collocated on the interior nodes is (d^2 - beta^2) chi
CMat input_map_stream(const HalfLineGrid& grid, double beta) {
  const int N = grid.size();
  CMat in = CMat::Zero(N - 2, N - 2); // chi dofs at interior nodes
  for (int j = 1; j < N - 1; ++j)
    for (int k = 1; k < N - 1; ++k) {
      in(j - 1, k - 1) = grid.d2()(j, k);
      if (j == k) in(j - 1, k - 1) -= beta * beta;
    }
  return in;
}

// Cholesky factor of the chi-space input metric ||(chi', beta chi)||^2
Eigen::LLT<Mat> input_metric(const HalfLineGrid& grid, double beta) {
  const int N = grid.size();
  Mat d1i = grid.d1().block(0, 1, N, N - 2); // chi vanishes at both ends
  Mat g = d1i.transpose() * grid.quad_weights().asDiagonal() * d1i;
  for (int j = 0; j < N - 2; ++j)
    g(j, j) += beta * beta * grid.quad_weights()[j + 1];
  return Eigen::LLT<Mat>(g);
}

CMat output_map(const ModeContext& ctx, const HalfLineGrid& grid,
                ResolventNormKind which) {
  const int N = grid.size();
  const double alpha = ctx.alpha;
  switch (which) {
    case ResolventNormKind::L2ToL2: {
      // velocity (-phi', i a phi): pair components
      CMat out = CMat::Zero(2 * N, 2 * N);
      out.topLeftCorner(N, N) = grid.d1().cast<Complex>();
      for (int j = 0; j < N; ++j) out(N + j, j) = alpha;
      return out;
    }
    case ResolventNormKind::L2ToGradient: {
      // rows: phi'', a phi', a phi', a^2 phi
      CMat out = CMat::Zero(4 * N, 2 * N);
      out.topLeftCorner(N, N) = grid.d2().cast<Complex>();
      out.block(N, 0, N, N) = alpha * grid.d1().cast<Complex>();
      out.block(2 * N, 0, N, N) = alpha * grid.d1().cast<Complex>();
      for (int j = 0; j < N; ++j) out(3 * N + j, j) = alpha * alpha;
      return out;
    }
    case ResolventNormKind::L2ToWeightedCurl: {
      const WeightSpec rho = WeightSpec::rho(std::abs(ctx.n), ctx.gamma, ctx.delta);
      CMat out = CMat::Zero(N, 2 * N);
      for (int j = 0; j < N; ++j)
        out(j, N + j) = std::sqrt(rho(grid.nodes()[j]));
      return out;
    }
  }
  throw ConfigError("resolvent_norm: unknown kind");
}

Vec out_weight_diag(const HalfLineGrid& grid, int copies) {
  const int N = grid.size();
  Vec w(copies * N);
  for (int c = 0; c < copies; ++c) w.segment(c * N, N) = grid.quad_weights();
  return w;
}

} // namespace

double resolvent_norm(const ShearProfile& profile, const ModeContext& ctx,
                      const HalfLineGrid& grid, ResolventNormKind which) {
  const int N = grid.size();
  const CMat sol = solution_map(profile, ctx, grid);
  const CMat in = input_map_stream(grid, ctx.beta());
  const CMat out = output_map(ctx, grid, which);
  CMat m = out * sol * in; // (cN) x (N-2)
  const int copies = static_cast<int>(m.rows()) / N;
  const Vec wo = out_weight_diag(grid, copies);
  for (int i = 0; i < m.rows(); ++i) m.row(i) *= std::sqrt(wo[i]);
  // right-multiply by the inverse Cholesky factor of the input metric
  const Eigen::LLT<Mat> llt = input_metric(grid, ctx.beta());
  const Mat lt = llt.matrixU();
  m = lt.cast<Complex>().transpose().template triangularView<Eigen::Lower>().solve(
          m.transpose()).transpose();
  Eigen::BDCSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

CVec random_decaying(const HalfLineGrid& grid, std::mt19937_64& rng, int wall_order) {
  // decay rate bounded away from L^{-1} log-scales so the far-field values
  // sit below the solver tolerances
  std::uniform_real_distribution<double> unif(1.2, 2.2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = unif(rng);
  CVec out(grid.size());
  Complex c[6];
  for (auto& ck : c) ck = Complex(gauss(rng), gauss(rng));
  for (int j = 0; j < grid.size(); ++j) {
    const double y = grid.nodes()[j];
    Complex p = 0.0;
    double yk = std::pow(y, wall_order);
    for (int k = 0; k < 6; ++k) {
      p += c[k] * yk;
      yk *= y / (k + 1.0);
    }
    out[j] = p * std::exp(-sigma * y);
  }
  return out;
}

double resolvent_norm_randomized(const ShearProfile& profile, const ModeContext& ctx,
                                 const HalfLineGrid& grid, ResolventNormKind which,
                                 int draws, std::mt19937_64& rng) {
  double best = 0.0;
  const Complex ib(0.0, ctx.beta());
  for (int d = 0; d < draws; ++d) {
    const CVec chi = random_decaying(grid, rng, 1);
    CVec f1 = -grid.d1_apply(chi);
    CVec f2 = ib * chi;
    const double in_norm = norm_pair(grid, chi, ctx.alpha);
    const OSSolution s =
        solve_os_nonslip(profile, ctx, RhsSpec::pair(f1, f2), grid);
    double out_norm = 0.0;
    switch (which) {
      case ResolventNormKind::L2ToL2:
        out_norm = s.pair_norm;
        break;
      case ResolventNormKind::L2ToGradient: {
        const CVec d2phi = grid.d2_apply(s.phi);
        const CVec d1phi = grid.d1_apply(s.phi);
        double acc = 0.0;
        for (int j = 0; j < grid.size(); ++j)
          acc += grid.quad_weights()[j] *
                 (std::norm(d2phi[j]) + 2.0 * ctx.alpha * ctx.alpha * std::norm(d1phi[j]) +
                  std::pow(ctx.alpha, 4) * std::norm(s.phi[j]));
        out_norm = std::sqrt(acc);
        break;
      }
      case ResolventNormKind::L2ToWeightedCurl:
        out_norm = norm_weighted_l2(grid, s.w,
                                    WeightSpec::rho(std::abs(ctx.n), ctx.gamma, ctx.delta));
        break;
    }
    best = std::max(best, out_norm / in_norm);
  }
  return best;
}

namespace {

struct IdCheck {
  bool needs_middle = false;
  bool needs_admissible = false;      // Remu with the context delta
  double delta_cap = 0.0;             // required delta <= cap (0: no cap)
  bool needs_lambda_small = false;    // |lambda| <= 1/delta1
  bool needs_lambda_large = false;    // |lambda| >= 1/delta1
  bool needs_immu = false;            // alpha lambda_i + nu^{1/2} alpha^2 >= 1/delta2
  bool needs_lambda_i_pos = false;
  bool needs_lambda_r_ge1 = false;
  bool needs_concavity = false;
  bool needs_positive_n = false;
};

IdCheck id_requirements(const std::string& id, const DeltaFamily& d) {
  IdCheck c;
  if (id == "lambda-large-L2" || id == "lambda-large-Linfinity") {
    c.needs_admissible = true;
    c.delta_cap = d.delta1;
    c.needs_lambda_large = true;
  } else if (id == "ieq-Immu-large1" || id == "ieq-Immu-large2") {
    c.needs_immu = true;
  } else if (id == "navier-slip-resolvent" || id == "weighted-w2" ||
             id == "nonslip-resolvent") {
    c.needs_middle = c.needs_admissible = true;
    c.delta_cap = d.delta_star;
    c.needs_lambda_i_pos = true;
    c.needs_positive_n = true;
    if (id == "weighted-w2") c.needs_concavity = true;
  } else if (id == "rayleigh-trick-first") {
    c.needs_lambda_i_pos = c.needs_concavity = true;
  } else if (id == "rayleigh-trick-second") {
    c.needs_lambda_i_pos = c.needs_lambda_r_ge1 = c.needs_concavity = true;
  } else if (id == "rayleigh-solve") {
    c.needs_lambda_i_pos = c.needs_lambda_small = c.needs_concavity = true;
  } else if (id == "corrector-error" || id == "corrector-norms" || id == "corrector-J" ||
             id == "corrector-Wb") {
    c.needs_middle = c.needs_admissible = true;
    c.delta_cap = d.delta_star;
    c.needs_lambda_i_pos = c.needs_lambda_small = true;
    c.needs_positive_n = true;
  } else {
    throw ConfigError("verify_inequality: unknown id '" + id + "'");
  }
  return c;
}

std::optional<std::string> violated_clause(const std::string& id,
                                           const ShearProfile& profile,
                                           const ModeContext& ctx) {
  const IdCheck c = id_requirements(id, ctx.deltas);
  if (ctx.exploratory) return std::nullopt;
  if (c.needs_positive_n && ctx.n <= 0) return "n > 0";
  if (c.needs_middle) {
    const auto r = classify(profile, ctx.nu, ctx.n, ctx.gamma);
    if (r != FrequencyRegime::MiddleSmall && r != FrequencyRegime::MiddleLarge)
      return "middle frequency range";
    if (ctx.gamma < 2.0 / 3.0 - 1e-12 || ctx.gamma > 1.0 + 1e-12) return "gamma in [2/3,1]";
  }
  if (c.needs_admissible) {
    if (!ctx.resolvent_admissible()) return "Re mu >= nu^{1/2}|n|^gamma/delta";
    if (c.delta_cap > 0.0 && ctx.delta > c.delta_cap * (1.0 + 1e-12))
      return "delta small enough for this estimate";
  }
  if (c.needs_lambda_small && std::abs(ctx.lambda) > 1.0 / ctx.deltas.delta1)
    return "|lambda| <= delta1^{-1}";
  if (c.needs_lambda_large && std::abs(ctx.lambda) < 1.0 / ctx.deltas.delta1)
    return "|lambda| >= delta1^{-1}";
  if (c.needs_immu &&
      ctx.alpha * ctx.lambda_i() + std::sqrt(ctx.nu) * ctx.alpha * ctx.alpha <
          1.0 / ctx.deltas.delta2)
    return "alpha lambda_i + nu^{1/2} alpha^2 >= delta2^{-1}";
  if (c.needs_lambda_i_pos && ctx.lambda_i() <= 0.0) return "lambda_i > 0";
  if (c.needs_lambda_r_ge1 && ctx.lambda_r() < 1.0) return "lambda_r >= 1";
  if (c.needs_concavity && !profile.concavity_m()) return "certified concavity constant";
  return std::nullopt;
}

// the 1/V' weights grow like e^Y, so grid values underneath the relative
// machine floor would otherwise dominate the quadrature with amplified noise;
// the true integrand is boundary-layer localized and unaffected by the cut
double vprime_weighted_pair(const ShearProfile& profile, const HalfLineGrid& grid,
                            const CVec& w, double alpha) {
  const CVec dw = grid.d1_apply(w);
  const double floor_w = 1e-13 * w.cwiseAbs().maxCoeff();
  const double floor_dw = 1e-13 * dw.cwiseAbs().maxCoeff();
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double vp = profile.d1(grid.nodes()[j]);
    const double aw = std::abs(w[j]) < floor_w ? 0.0 : std::norm(w[j]);
    const double adw = std::abs(dw[j]) < floor_dw ? 0.0 : std::norm(dw[j]);
    acc += grid.quad_weights()[j] * (adw + alpha * alpha * aw) / (vp * vp);
  }
  return std::sqrt(acc);
}

double vprime_weighted(const ShearProfile& profile, const HalfLineGrid& grid,
                       const CVec& w) {
  const double floor_w = 1e-13 * w.cwiseAbs().maxCoeff();
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double vp = profile.d1(grid.nodes()[j]);
    if (std::abs(w[j]) < floor_w) continue;
    acc += grid.quad_weights()[j] * std::norm(w[j]) / (vp * vp);
  }
  return std::sqrt(acc);
}

} // namespace

SweepResult verify_inequality(const std::string& inequality_id,
                              const ShearProfile& profile,
                              const std::vector<ModeContext>& sweep,
                              const HalfLineGrid& grid, int draws,
                              unsigned long long seed) {
  SweepResult result;
  const int N = grid.size();
  id_requirements(inequality_id, DeltaFamily{}); // validates the id up front

  for (std::size_t idx = 0; idx < sweep.size(); ++idx) {
    const ModeContext& ctx = sweep[idx];
    if (auto clause = violated_clause(inequality_id, profile, ctx)) {
      result.rejected.push_back({idx, *clause});
      continue;
    }
    // per-entry seed keeps the sweep order-independent
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (idx + 1)));
    const double ai = ctx.alpha * ctx.lambda_i();
    const double li = ctx.lambda_i();
    const double rootnu = std::sqrt(ctx.nu);

    auto emit = [&](double lhs, double rhs_shape) {
      EstimateReport r =
          EstimateReport::from_context(inequality_id, ctx, N, lhs, rhs_shape);
      r.seed = seed;
      result.reports.push_back(r);
      result.summary.absorb(result.reports.back());
    };

    if (inequality_id == "lambda-large-L2" || inequality_id == "lambda-large-Linfinity" ||
        inequality_id == "nonslip-resolvent") {
      for (int d = 0; d < draws; ++d) {
        CVec f1 = random_decaying(grid, rng, 0);
        CVec f2 = random_decaying(grid, rng, 0);
        const double fn = std::sqrt(std::pow(norm_l2(grid, f1), 2) +
                                    std::pow(norm_l2(grid, f2), 2));
        const OSSolution s = solve_os_nonslip(profile, ctx, RhsSpec::pair(f1, f2), grid);
        if (inequality_id == "lambda-large-L2") {
          emit(s.pair_norm, fn / (ctx.alpha * std::abs(ctx.lambda)));
        } else if (inequality_id == "lambda-large-Linfinity") {
          emit(s.w_norm,
               fn / (std::pow(ctx.nu, 0.25) * std::sqrt(ctx.alpha * std::abs(ctx.lambda))));
        } else {
          const WeightSpec rl = WeightSpec::rho_lambda(std::abs(ctx.n), li);
          const double r1 = s.pair_norm * ai * li / fn;
          const double r2 = s.w_norm * std::pow(ctx.nu, 0.25) * std::sqrt(ctx.alpha) *
                            std::pow(li, 1.25) / fn;
          const double r3 = norm_weighted_l2(grid, s.w, rl) * std::pow(ctx.nu, 0.25) *
                            std::sqrt(ctx.alpha) * std::sqrt(li) / fn;
          emit(std::max({r1, r2, r3}), 1.0);
        }
      }
    } else if (inequality_id == "ieq-Immu-large1" || inequality_id == "ieq-Immu-large2") {
      const double denom = ai + rootnu * ctx.alpha * ctx.alpha;
      for (int d = 0; d < draws; ++d) {
        CVec f1 = random_decaying(grid, rng, 0);
        CVec f2 = random_decaying(grid, rng, 0);
        const double fn = std::sqrt(std::pow(norm_l2(grid, f1), 2) +
                                    std::pow(norm_l2(grid, f2), 2));
        const OSSolution s = solve_os_nonslip(profile, ctx, RhsSpec::pair(f1, f2), grid);
        if (inequality_id == "ieq-Immu-large1") {
          const double lhs = norm_l2(grid, grid.d1_apply(s.phi)) +
                             ctx.alpha * norm_l2(grid, s.phi);
          emit(lhs, fn / denom);
        } else {
          emit(s.w_norm, fn / (std::pow(ctx.nu, 0.25) * std::sqrt(denom)));
        }
      }
    } else if (inequality_id == "navier-slip-resolvent") {
      for (int d = 0; d < draws; ++d) {
        CVec f1 = random_decaying(grid, rng, 0);
        CVec f2 = random_decaying(grid, rng, 0);
        const double fn = std::sqrt(std::pow(norm_l2(grid, f1), 2) +
                                    std::pow(norm_l2(grid, f2), 2));
        const OSSolution s = solve_os_navier(profile, ctx, RhsSpec::pair(f1, f2), grid);
        const double lhs = std::pow(ctx.nu, 0.25) * std::sqrt(ctx.alpha) *
                               std::pow(li, -0.5) * s.w_norm +
                           ai * s.pair_norm;
        emit(lhs, fn / li);
      }
    } else if (inequality_id == "weighted-w2") {
      for (int d = 0; d < draws; ++d) {
        CVec h = random_decaying(grid, rng, 0);
        const double hn = norm_l2(grid, h);
        const OSSolution s = solve_os_navier(profile, ctx, RhsSpec::vprime_h(h), grid);
        const double lhs = ai * s.pair_norm +
                           std::pow(ctx.nu, 0.25) * std::sqrt(ai) *
                               vprime_weighted_pair(profile, grid, s.w, ctx.alpha) +
                           ai * vprime_weighted(profile, grid, s.w);
        emit(lhs, hn);
      }
    } else if (inequality_id == "rayleigh-trick-first" ||
               inequality_id == "rayleigh-trick-second") {
      const double m = *profile.concavity_m();
      for (int d = 0; d < draws; ++d) {
        CVec phi = random_decaying(grid, rng, 1);
        const double pn = norm_pair(grid, phi, ctx.alpha);
        phi /= pn;
        const CVec rphi = [&] {
          CVec lap = grid.d2_apply(phi) - ctx.alpha * ctx.alpha * phi;
          CVec out(N);
          for (int j = 0; j < N; ++j) {
            const double y = grid.nodes()[j];
            out[j] = (profile.value(y) - ctx.lambda) * lap[j] - profile.d2(y) * phi[j];
          }
          return out;
        }();
        Complex integral = 0.0;
        double weighted = 0.0;
        for (int j = 0; j < N; ++j) {
          const double y = grid.nodes()[j];
          const Complex vm = profile.value(y) - ctx.lambda;
          integral += grid.quad_weights()[j] * rphi[j] * std::conj(phi[j]) / vm;
          const double v = profile.value(y);
          weighted += grid.quad_weights()[j] * (1.0 - v) * profile.d1(y) * profile.d1(y) *
                      std::norm(phi[j]) / std::norm(vm);
        }
        const double lhs = 1.0 + weighted / m; // pair norm normalized to one
        double rhs;
        if (inequality_id == "rayleigh-trick-first") {
          rhs = ((1.0 - ctx.lambda) / (Complex(0, 1) * li) * integral).real();
        } else {
          rhs = -integral.real();
        }
        emit(lhs, rhs);
      }
    } else if (inequality_id == "rayleigh-solve") {
      for (int d = 0; d < draws; ++d) {
        CVec h1 = random_decaying(grid, rng, 0);
        CVec h2 = random_decaying(grid, rng, 0);
        CVec h3 = random_decaying(grid, rng, 0);
        const OSSolution s = solve_rayleigh(profile, ctx, h1, h2, h3, grid);
        const double rhs = norm_l2(grid, h1) / li +
                           std::sqrt(std::pow(norm_l2(grid, h2), 2) +
                                     std::pow(norm_l2(grid, h3), 2)) /
                               (li * li);
        emit(s.pair_norm, rhs);
      }
    } else if (inequality_id == "corrector-error" || inequality_id == "corrector-norms" ||
               inequality_id == "corrector-J" || inequality_id == "corrector-Wb") {
      const CorrectorBundle cb = build_corrector(profile, ctx, grid);
      const double a_pow = ctx.scale_a;
      if (inequality_id == "corrector-error") {
        const double lhs = std::pow(ctx.nu, 0.25) * std::sqrt(ctx.alpha) *
                               std::pow(li, -0.5) * norm_l2(grid, cb.w_err) +
                           ai * norm_pair(grid, cb.phi_err, ctx.alpha);
        emit(lhs, ctx.alpha / li * std::pow(a_pow, -3.5));
      } else if (inequality_id == "corrector-norms") {
        const WeightSpec rl = WeightSpec::rho_lambda(std::abs(ctx.n), li);
        const double r1 = norm_pair(grid, cb.phi_hom, ctx.alpha) * std::pow(a_pow, 1.5);
        const double r2 = norm_l2(grid, cb.w_hom) * std::pow(a_pow, 0.5);
        const double r3 = norm_weighted_l2(grid, cb.w_hom, rl) * a_pow /
                          (std::pow(std::abs(ctx.n), 0.25) * std::pow(li, 0.75));
        emit(std::max({r1, r2, r3}), 1.0);
      } else if (inequality_id == "corrector-J") {
        emit(1.0 / a_pow, std::abs(cb.j));
      } else {
        const WeightSpec rl = WeightSpec::rho_lambda(std::abs(ctx.n), li);
        const double r1 = norm_pair(grid, cb.phi_b, ctx.alpha) * std::pow(a_pow, 0.5);
        const double r2 = norm_l2(grid, cb.w_b) / std::pow(a_pow, 0.5);
        const double r3 = norm_weighted_l2(grid, cb.w_b, rl) /
                          (std::pow(std::abs(ctx.n), 0.25) * std::pow(li, 0.75));
        emit(std::max({r1, r2, r3}), 1.0);
      }
    }
  }
  return result;
}

} // namespace blstab
