#include "rmtde/covariance_opt.hpp"
#include "rmtde/det_equiv.hpp"
#include "rmtde/monte_carlo.hpp"
#include "rmtde/scenario_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rmtde;

PYBIND11_MODULE(_core, m) {
  m.doc() = "deterministic equivalents for correlated MIMO multiple-access channels";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_RuntimeError);

  py::enum_<FadingFamily>(m, "FadingFamily")
      .value("ComplexGaussian", FadingFamily::ComplexGaussian)
      .value("NakagamiPhase", FadingFamily::NakagamiPhase)
      .value("LogNormalPhase", FadingFamily::LogNormalPhase);

  py::class_<FadingSpec>(m, "FadingSpec")
      .def_static("gaussian", &FadingSpec::gaussian)
      .def_static("nakagami", &FadingSpec::nakagami, py::arg("m"))
      .def_static("lognormal", &FadingSpec::lognormal, py::arg("sigma"))
      .def_static("lognormal_with_cv", &FadingSpec::lognormal_with_cv, py::arg("cv"))
      .def_readonly("family", &FadingSpec::family)
      .def_readonly("m", &FadingSpec::m)
      .def_readonly("sigma", &FadingSpec::sigma)
      .def("family_name", &FadingSpec::family_name)
      .def("__repr__", [](const FadingSpec& f) { return "FadingSpec(" + f.family_name() + ")"; });

  m.def("cv_of", &cv_of, py::arg("fading"));

  py::class_<UserSpec>(m, "UserSpec")
      .def(py::init([](Index n, const Matrix& R, const Matrix& T, const Matrix& Hbar,
                       const FadingSpec& fading) {
             return UserSpec{n, R, T, Hbar, fading};
           }),
           py::arg("n"), py::arg("R") = Matrix(), py::arg("T") = Matrix(),
           py::arg("Hbar") = Matrix(), py::arg("fading") = FadingSpec::gaussian())
      .def_readonly("n", &UserSpec::n)
      .def_readonly("R", &UserSpec::R)
      .def_readonly("T", &UserSpec::T)
      .def_readonly("Hbar", &UserSpec::Hbar)
      .def_readonly("fading", &UserSpec::fading);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def_readonly("N", &ScenarioSpec::N)
      .def_readonly("users", &ScenarioSpec::users)
      .def_readonly("S", &ScenarioSpec::S)
      .def("K", &ScenarioSpec::K)
      .def("n_total", &ScenarioSpec::n_total)
      .def("beta", &ScenarioSpec::beta, py::arg("k"))
      .def("has_los", &ScenarioSpec::has_los)
      .def("has_interference", &ScenarioSpec::has_interference);

  m.def("build_scenario", &build_scenario, py::arg("N"), py::arg("users"),
        py::arg("S") = Matrix());
  m.def("ula_correlation", &ula_correlation, py::arg("n"), py::arg("mean_angle_deg"),
        py::arg("spread_deg"));
  m.def("sample_fading", &sample_fading, py::arg("fading"), py::arg("rows"), py::arg("cols"),
        py::arg("seed"));

  m.def("scenario_to_json", &scenario_to_json_string, py::arg("spec"), py::arg("indent") = 2);
  m.def("scenario_from_json", &scenario_from_json_string, py::arg("text"));
  m.def("save_scenario", &save_scenario, py::arg("spec"), py::arg("path"));
  m.def("load_scenario", &load_scenario, py::arg("path"));

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("tol", &SolveOptions::tol)
      .def_readwrite("max_iter", &SolveOptions::max_iter)
      .def_readwrite("damping", &SolveOptions::damping);

  py::class_<FixedPointState>(m, "FixedPointState")
      .def_readonly("z", &FixedPointState::z)
      .def_readonly("e", &FixedPointState::e)
      .def_readonly("e_tilde", &FixedPointState::e_tilde)
      .def_readonly("residual", &FixedPointState::residual)
      .def_readonly("iterations", &FixedPointState::iterations)
      .def_readonly("converged", &FixedPointState::converged);

  py::class_<DetEquivResult>(m, "DetEquivResult")
      .def_readonly("state", &DetEquivResult::state)
      .def_readonly("Psi", &DetEquivResult::Psi)
      .def_readonly("Psi_tilde", &DetEquivResult::Psi_tilde)
      .def_readonly("stieltjes", &DetEquivResult::stieltjes);

  m.def("solve_fixed_point", &solve_fixed_point, py::arg("spec"), py::arg("z"),
        py::arg("options") = SolveOptions());
  m.def("det_stieltjes", &det_stieltjes, py::arg("spec"), py::arg("z"),
        py::arg("options") = SolveOptions());
  m.def("det_shannon", &det_shannon, py::arg("spec"), py::arg("sigma2"),
        py::arg("options") = SolveOptions());
  m.def("shannon_via_integral", [](const ScenarioSpec& spec, double sigma2) {
          return shannon_via_integral(spec, sigma2);
        },
        py::arg("spec"), py::arg("sigma2"));

  py::class_<UniquenessDiagnostic>(m, "UniquenessDiagnostic")
      .def_readonly("u1", &UniquenessDiagnostic::u1)
      .def_readonly("u2", &UniquenessDiagnostic::u2)
      .def_readonly("v1", &UniquenessDiagnostic::v1)
      .def_readonly("v2", &UniquenessDiagnostic::v2)
      .def_readonly("Gamma", &UniquenessDiagnostic::Gamma)
      .def_readonly("spectral_radius", &UniquenessDiagnostic::spectral_radius);

  m.def("uniqueness_diagnostic", &uniqueness_diagnostic, py::arg("spec"), py::arg("result"));

  py::class_<MomentIdentity>(m, "MomentIdentity")
      .def_readonly("trace_formula", &MomentIdentity::trace_formula)
      .def_readonly("probe", &MomentIdentity::probe);

  m.def("moment_identity", [](const ScenarioSpec& spec) { return moment_identity(spec); },
        py::arg("spec"));

  py::class_<ChannelDraw>(m, "ChannelDraw")
      .def_readonly("H", &ChannelDraw::H)
      .def_readonly("B", &ChannelDraw::B);

  m.def("assemble_channel",
        [](const ScenarioSpec& spec, std::uint64_t seed) { return assemble_channel(spec, seed); },
        py::arg("spec"), py::arg("seed"));
  m.def("empirical_stieltjes", &empirical_stieltjes, py::arg("B"), py::arg("z"));
  m.def("empirical_mutual_info", &empirical_mutual_info, py::arg("draw"), py::arg("sigma2"));

  py::enum_<Quantity>(m, "Quantity")
      .value("MutualInfo", Quantity::MutualInfo)
      .value("Stieltjes", Quantity::Stieltjes);

  py::class_<PointStats>(m, "PointStats")
      .def_readonly("mean", &PointStats::mean)
      .def_readonly("variance", &PointStats::variance);

  py::class_<EnsembleResult>(m, "EnsembleResult")
      .def_readonly("quantity", &EnsembleResult::quantity)
      .def_readonly("grid", &EnsembleResult::grid)
      .def_readonly("points", &EnsembleResult::points)
      .def_readonly("trials", &EnsembleResult::trials)
      .def_readonly("master_seed", &EnsembleResult::master_seed);

  m.def("run_ensemble", &run_ensemble, py::arg("spec"), py::arg("quantity"), py::arg("grid"),
        py::arg("trials"), py::arg("master_seed"), py::arg("threads") = 1);

  py::class_<DistributionGap>(m, "DistributionGap")
      .def_readonly("gap", &DistributionGap::gap)
      .def_readonly("std_error", &DistributionGap::std_error);

  m.def("distribution_gap", &distribution_gap, py::arg("spec"), py::arg("z"), py::arg("trials"),
        py::arg("master_seed"), py::arg("threads") = 1);

  m.def("waterfill_allocation", &waterfill_allocation, py::arg("gains"), py::arg("budget"));

  py::class_<CovarianceSolution>(m, "CovarianceSolution")
      .def_readonly("Q", &CovarianceSolution::Q)
      .def_readonly("t_eigs", &CovarianceSolution::t_eigs)
      .def_readonly("mode_power", &CovarianceSolution::mode_power)
      .def_readonly("rate", &CovarianceSolution::rate)
      .def_readonly("iterations", &CovarianceSolution::iterations)
      .def_readonly("rate_trajectory", &CovarianceSolution::rate_trajectory);

  m.def("optimize_covariance",
        [](const ScenarioSpec& spec, double sigma2) { return optimize_covariance(spec, sigma2); },
        py::arg("spec"), py::arg("sigma2"));
}
