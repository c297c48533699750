// Python bindings for the quadratic boson form library.

#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbf/bcs.hpp"
#include "qbf/cli.hpp"
#include "qbf/core.hpp"
#include "qbf/evolution.hpp"
#include "qbf/io.hpp"
#include "qbf/normal_modes.hpp"
#include "qbf/oracle.hpp"
#include "qbf/spectral.hpp"

namespace py = pybind11;
using namespace qbf;

PYBIND11_MODULE(_qbf, m) {
  m.doc() = "Quadratic boson forms: classification, normal modes and evolution.";

  static py::exception<Error> error(m, "QbfError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      py::set_error(error, msg.c_str());
    }
  });

  py::enum_<ErrorCode>(m, "ErrorCode")
      .value("DimensionMismatch", ErrorCode::DimensionMismatch)
      .value("StructureViolation", ErrorCode::StructureViolation)
      .value("PairingFailure", ErrorCode::PairingFailure)
      .value("NullNorm", ErrorCode::NullNorm)
      .value("NotDiagonalizable", ErrorCode::NotDiagonalizable)
      .value("Overflow", ErrorCode::Overflow)
      .value("InvalidArgument", ErrorCode::InvalidArgument)
      .value("DegenerateGap", ErrorCode::DegenerateGap)
      .value("NotDegenerate", ErrorCode::NotDegenerate)
      .value("DimensionCap", ErrorCode::DimensionCap)
      .value("WrongRegime", ErrorCode::WrongRegime)
      .value("ParseError", ErrorCode::ParseError)
      .value("BadRange", ErrorCode::BadRange);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("structural", &Tolerances::structural)
      .def_readwrite("eig", &Tolerances::eig)
      .def_readwrite("pair", &Tolerances::pair)
      .def_readwrite("rank", &Tolerances::rank)
      .def_readwrite("null_norm", &Tolerances::null_norm)
      .def_readwrite("cluster", &Tolerances::cluster)
      .def_readwrite("grid", &Tolerances::grid)
      .def_readwrite("evo", &Tolerances::evo);

  py::class_<QuadraticForm>(m, "QuadraticForm")
      .def_property_readonly("n_modes", &QuadraticForm::n_modes)
      .def_property_readonly("A", &QuadraticForm::A)
      .def_property_readonly("B", &QuadraticForm::B);

  m.def("build_form", &build_form, py::arg("A"), py::arg("B"),
        py::arg("tol_struct") = Tolerances{}.structural);
  m.def("extended_matrix", [](const QuadraticForm& f) { return extended_matrix(f).H; });
  m.def("dynamical_matrix", [](const QuadraticForm& f) { return dynamical_matrix(f).Ht; });
  m.def("metric", &metric);

  py::enum_<Stability>(m, "Stability")
      .value("PositiveDefinite", Stability::PositiveDefinite)
      .value("StableNonPositive", Stability::StableNonPositive)
      .value("UnstableComplex", Stability::UnstableComplex)
      .value("NonDiagonalizable", Stability::NonDiagonalizable);

  py::class_<BogoliubovTransform>(m, "BogoliubovTransform")
      .def_readonly("W", &BogoliubovTransform::W)
      .def_readonly("W_inv", &BogoliubovTransform::W_inv)
      .def_readonly("lambdas", &BogoliubovTransform::lambdas)
      .def_readonly("hermitian", &BogoliubovTransform::hermitian)
      .def_readonly("symplectic_residual", &BogoliubovTransform::symplectic_residual)
      .def_readonly("condition", &BogoliubovTransform::condition);

  py::class_<StabilityReport>(m, "StabilityReport")
      .def_readonly("classification", &StabilityReport::classification)
      .def_readonly("h_eigenvalues", &StabilityReport::h_eigenvalues)
      .def_readonly("mode_frequencies", &StabilityReport::mode_frequencies)
      .def_readonly("diagonalizable", &StabilityReport::diagonalizable)
      .def_readonly("zero_mode_count", &StabilityReport::zero_mode_count)
      .def_readonly("transform", &StabilityReport::transform)
      .def_readonly("warnings", &StabilityReport::warnings)
      .def("max_imag", &StabilityReport::max_imag)
      .def("to_json", [](const StabilityReport& r) { return to_json(r).dump(); });

  m.def("classify", &classify, py::arg("form"), py::arg("tol") = Tolerances{});

  py::class_<DiagonalForm>(m, "DiagonalForm")
      .def_readonly("lambdas", &DiagonalForm::lambdas)
      .def_readonly("extract_b", &DiagonalForm::extract_b)
      .def_readonly("extract_bbar", &DiagonalForm::extract_bbar)
      .def_readonly("hermitian_flags", &DiagonalForm::hermitian_flags)
      .def_readonly("zero_point_energy", &DiagonalForm::zero_point_energy)
      .def("commutator_b_bbar", &DiagonalForm::commutator_b_bbar)
      .def("reconstruct_extended", &DiagonalForm::reconstruct_extended);

  m.def("diagonal_form",
        py::overload_cast<const StabilityReport&, const Tolerances&>(&diagonal_form),
        py::arg("report"), py::arg("tol") = Tolerances{});
  m.def("invariants", [](const BogoliubovTransform& bt) { return invariants(bt).K; });
  m.def("invariant_residual", &invariant_residual);

  py::class_<Propagator>(m, "Propagator")
      .def_readonly("t", &Propagator::t)
      .def_readonly("U", &Propagator::U)
      .def_readonly("symplectic_residual", &Propagator::symplectic_residual)
      .def_readonly("adjoint_residual", &Propagator::adjoint_residual)
      .def_readonly("norm", &Propagator::norm);

  m.def("propagate", [](const QuadraticForm& f, cplx t) { return propagate(dynamical_matrix(f), t); },
        py::arg("form"), py::arg("t"));
  m.def("rk4_residual",
        [](const QuadraticForm& f, double t, int steps) {
          return ode_cross_check(dynamical_matrix(f), t, steps).relative;
        },
        py::arg("form"), py::arg("t"), py::arg("steps"));

  py::class_<BcsParams>(m, "BcsParams")
      .def(py::init([](double epsilon, double gamma, double delta, double kappa) {
             BcsParams p{epsilon, gamma, delta, kappa};
             p.validate();
             return p;
           }),
           py::arg("epsilon") = 1.0, py::arg("gamma") = 0.3, py::arg("delta") = 0.0,
           py::arg("kappa") = 0.0)
      .def_readonly("epsilon", &BcsParams::epsilon)
      .def_readonly("gamma", &BcsParams::gamma)
      .def_readonly("delta", &BcsParams::delta)
      .def_readonly("kappa", &BcsParams::kappa);

  m.def("bcs_form", &bcs_form);
  m.def("bcs_sigma", &bcs_sigma);
  m.def("bcs_lambda", [](const BcsParams& p) {
    const auto l = bcs_lambda(p);
    return std::make_pair(l.plus, l.minus);
  });
  m.def("bcs_uv", &bcs_uv, py::arg("params"), py::arg("tol") = 1e-12);
  m.def("bcs_closed_evolution", &bcs_closed_evolution, py::arg("params"), py::arg("t"),
        py::arg("tol") = 1e-12);
  m.def("bcs_thresholds", [](const BcsParams& p) { return to_json(bcs_thresholds(p)).dump(); });

  m.def("ground_energy", &ground_energy, py::arg("form"), py::arg("n_max"),
        py::arg("cap") = kDefaultFockCap);
  m.def("fock_levels",
        [](const QuadraticForm& f, int n_max, int k) {
          const auto c = fock_spectrum_check(f, n_max, k);
          return std::make_tuple(c.levels, c.predicted, c.max_deviation);
        },
        py::arg("form"), py::arg("n_max"), py::arg("levels"));

  m.def("parse_form", [](const std::string& text) { return parse_form(text).form; });
  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "qbf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return std::make_tuple(code, out.str(), err.str());
  });
}
