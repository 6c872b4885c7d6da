#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "blstab/airy.hpp"
#include "blstab/nonlinear.hpp"
#include "blstab/resolvent.hpp"
#include "blstab/scenario.hpp"
#include "blstab/semigroup.hpp"

namespace py = pybind11;
using namespace blstab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "boundary-layer shear flow stability toolkit";

  // special functions
  m.def("airy", [](Complex z) {
    const AiryPair p = airy(z);
    return py::make_tuple(p.ai, p.ai_prime);
  });
  m.def("a0", &a0);

  py::class_<ShearProfile>(m, "ShearProfile")
      .def_property_readonly("name", &ShearProfile::name)
      .def_property_readonly("profile_norm", &ShearProfile::profile_norm)
      .def_property_readonly("delta0", &ShearProfile::delta0)
      .def_property_readonly("certified", &ShearProfile::certified)
      .def("__call__", &ShearProfile::value)
      .def("derivatives", &ShearProfile::eval);
  m.def("make_builtin_profile", &make_builtin_profile);
  m.def("load_profile_csv", &load_profile_csv);

  py::class_<ScReport>(m, "ScReport")
      .def_readonly("passed", &ScReport::pass)
      .def_readonly("minimal_m", &ScReport::minimal_m)
      .def_readonly("certified_m", &ScReport::certified_m)
      .def_readonly("witness", &ScReport::witness)
      .def_readonly("reason", &ScReport::reason);
  m.def("check_sc", &check_sc);

  py::class_<GridParams>(m, "GridParams")
      .def(py::init<>())
      .def_readwrite("y_half", &GridParams::y_half)
      .def_readwrite("length", &GridParams::length);
  py::class_<HalfLineGrid>(m, "HalfLineGrid")
      .def(py::init<int, const GridParams&>(), py::arg("n_nodes"),
           py::arg("params") = GridParams{})
      .def_property_readonly("nodes", &HalfLineGrid::nodes)
      .def_property_readonly("quad_weights", &HalfLineGrid::quad_weights)
      .def("d1_apply", &HalfLineGrid::d1_apply)
      .def("d2_apply", &HalfLineGrid::d2_apply)
      .def("size", &HalfLineGrid::size);

  py::class_<DeltaFamily>(m, "DeltaFamily")
      .def_static("defaults", &DeltaFamily::defaults)
      .def_readwrite("delta0", &DeltaFamily::delta0)
      .def_readwrite("delta1", &DeltaFamily::delta1)
      .def_readwrite("delta2", &DeltaFamily::delta2)
      .def_readwrite("delta_star", &DeltaFamily::delta_star);

  py::class_<ModeContext>(m, "ModeContext")
      .def_static("from_mu", &ModeContext::from_mu)
      .def_static("from_lambda", &ModeContext::from_lambda)
      .def_readonly("nu", &ModeContext::nu)
      .def_readonly("n", &ModeContext::n)
      .def_readonly("alpha", &ModeContext::alpha)
      .def_readonly("mu", &ModeContext::mu)
      .def_readonly("lambda_", &ModeContext::lambda)
      .def_readonly("scale_a", &ModeContext::scale_a)
      .def("resolvent_admissible", &ModeContext::resolvent_admissible);

  m.def("classify", [](const ShearProfile& p, double nu, int n, double gamma) {
    return to_string(classify(p, nu, n, gamma));
  });
  m.def("in_resolvent_region", &in_resolvent_region);

  py::class_<OSSolution>(m, "OSSolution")
      .def_readonly("phi", &OSSolution::phi)
      .def_readonly("w", &OSSolution::w)
      .def_readonly("pair_norm", &OSSolution::pair_norm)
      .def_readonly("w_norm", &OSSolution::w_norm)
      .def_readonly("residual_norm", &OSSolution::residual_norm);

  m.def("solve_os_nonslip",
        [](const ShearProfile& p, const ModeContext& c, const CVec& f1, const CVec& f2,
           const HalfLineGrid& g) {
          return solve_os_nonslip(p, c, RhsSpec::pair(f1, f2), g);
        });
  m.def("solve_os_navier",
        [](const ShearProfile& p, const ModeContext& c, const CVec& f1, const CVec& f2,
           const HalfLineGrid& g) {
          return solve_os_navier(p, c, RhsSpec::pair(f1, f2), g);
        });
  m.def("poisson_stream", &poisson_stream);

  py::class_<CorrectorBundle>(m, "CorrectorBundle")
      .def_readonly("w_airy", &CorrectorBundle::w_airy)
      .def_readonly("w_b", &CorrectorBundle::w_b)
      .def_readonly("phi_b", &CorrectorBundle::phi_b)
      .def_readonly("j", &CorrectorBundle::j)
      .def_readonly("j_quadrature_gap", &CorrectorBundle::j_quadrature_gap);
  m.def("build_corrector", &build_corrector, py::arg("profile"), py::arg("ctx"),
        py::arg("grid"), py::arg("use_divergence_rhs") = false);
  m.def("assemble_nonslip", &assemble_nonslip);

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("inequality_id", &EstimateReport::inequality_id)
      .def_readonly("lhs", &EstimateReport::lhs)
      .def_readonly("rhs_shape", &EstimateReport::rhs_shape)
      .def_readonly("ratio", &EstimateReport::ratio)
      .def_readonly("resolution", &EstimateReport::resolution);

  m.def("inequality_ids", [] { return inequality_ids(); });
  m.def("verify_inequality",
        [](const std::string& id, const ShearProfile& p,
           const std::vector<ModeContext>& sweep, const HalfLineGrid& g, int draws,
           unsigned long long seed) {
          const SweepResult r = verify_inequality(id, p, sweep, g, draws, seed);
          py::list rejects;
          for (const auto& rej : r.rejected)
            rejects.append(py::make_tuple(rej.sweep_index, rej.clause));
          return py::make_tuple(r.reports, r.summary.sup_ratio, rejects);
        },
        py::arg("inequality_id"), py::arg("profile"), py::arg("sweep"), py::arg("grid"),
        py::arg("draws") = 5, py::arg("seed") = 1234);

  py::enum_<SemigroupMethod>(m, "SemigroupMethod")
      .value("contour", SemigroupMethod::Contour)
      .value("expm", SemigroupMethod::Expm)
      .value("timestep", SemigroupMethod::Timestep);
  py::class_<VelocityMode>(m, "VelocityMode")
      .def(py::init([](CVec v1, CVec v2) {
        return VelocityMode{std::move(v1), std::move(v2)};
      }))
      .def_readonly("v1", &VelocityMode::v1)
      .def_readonly("v2", &VelocityMode::v2);
  m.def("apply_semigroup", &apply_semigroup, py::arg("profile"), py::arg("ctx"),
        py::arg("grid"), py::arg("f"), py::arg("tau"), py::arg("method"),
        py::arg("theta") = M_PI / 2 + 0.1, py::arg("nsteps") = 0);
  m.def("conditioning_delta", &conditioning_delta, py::arg("nu"), py::arg("n"),
        py::arg("gamma"), py::arg("tau"), py::arg("target") = 10.0);

  m.def("run_scenario", [](const std::string& path, const std::string& out_dir) {
    RunOverrides ov;
    if (!out_dir.empty()) ov.out_dir = out_dir;
    return run_scenario(path, ov);
  }, py::arg("config"), py::arg("out_dir") = "");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<AiryOverflow>(m, "AiryOverflow");
  py::register_exception<AiryDomainError>(m, "AiryDomainError");
}
