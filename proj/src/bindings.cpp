#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "obsthermo/experiment.hpp"

namespace py = pybind11;
using namespace obsthermo;

namespace {

OperatorBasis basis_from_elements(const std::vector<Operator>& elements,
                                  bool orthonormal) {
  if (elements.empty()) {
    throw ValidationError("basis: need at least one element");
  }
  OperatorBasis b;
  b.dim = static_cast<int>(elements.front().rows());
  b.elements = elements;
  b.depths.assign(elements.size(), 0);
  b.orthonormal = orthonormal;
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Observability decomposition and heat/work accounting for "
            "bilinear quantum control systems";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  // operator kernel
  m.def("hs_inner", &hs_inner, "Hilbert-Schmidt inner product Tr(a^dag b)");
  m.def("commutator", &commutator);
  m.def("anticommutator", &anticommutator);
  m.def("traceless_part", &traceless_part);
  m.def("embed_site", &embed_site, py::arg("op"), py::arg("site"),
        py::arg("n_sites"));
  m.def("expm_unitary", &expm_unitary, py::arg("h"), py::arg("dt"),
        "exp(-i h dt) of a Hermitian generator");
  m.def("pauli_x", [] { return pauli_x(); });
  m.def("pauli_y", [] { return pauli_y(); });
  m.def("pauli_z", [] { return pauli_z(); });

  py::class_<ClosureReport>(m, "ClosureReport")
      .def_readonly("dimension", &ClosureReport::dimension)
      .def_readonly("max_depth", &ClosureReport::max_depth)
      .def_readonly("generator_count", &ClosureReport::generator_count)
      .def_readonly("rank_tol_used", &ClosureReport::rank_tol_used)
      .def_readonly("bracket_set", &ClosureReport::bracket_set);

  py::class_<OperatorBasis>(m, "OperatorBasis")
      .def_readonly("dim", &OperatorBasis::dim)
      .def_readonly("elements", &OperatorBasis::elements)
      .def_readonly("depths", &OperatorBasis::depths)
      .def_readonly("orthonormal", &OperatorBasis::orthonormal)
      .def("max_depth", &OperatorBasis::max_depth)
      .def("__len__", &OperatorBasis::size);

  m.def("close_algebra", &close_algebra, py::arg("generators"),
        py::arg("rank_tol") = kDefaultRankTol,
        "Dynamical Lie algebra closure of Hermitian generators");
  m.def("observability_space", &observability_space, py::arg("lie_basis"),
        py::arg("s"), py::arg("rank_tol") = kDefaultRankTol,
        py::arg("max_rounds") = -1);
  m.def("gram_schmidt", &gram_schmidt);
  m.def("is_ideal", &is_ideal, py::arg("sub"), py::arg("full"),
        py::arg("rank_tol") = kDefaultRankTol);
  m.def("basis_from_elements", &basis_from_elements, py::arg("elements"),
        py::arg("orthonormal") = false);

  py::class_<DensityState>(m, "DensityState")
      .def(py::init(&DensityState::checked), py::arg("rho"))
      .def_readonly("rho", &DensityState::rho)
      .def_readonly("purity", &DensityState::purity);

  py::class_<StateDecomposition>(m, "StateDecomposition")
      .def_readonly("rho_o", &StateDecomposition::rho_o)
      .def_readonly("rho_u", &StateDecomposition::rho_u)
      .def_readonly("theta", &StateDecomposition::theta)
      .def_readonly("effective_state", &StateDecomposition::effective_state)
      .def_readonly("psd_violation", &StateDecomposition::psd_violation);

  py::class_<HamiltonianSplit>(m, "HamiltonianSplit")
      .def_readonly("h_o", &HamiltonianSplit::h_o)
      .def_readonly("h_u", &HamiltonianSplit::h_u)
      .def_readonly("h_coeffs", &HamiltonianSplit::h_coeffs);

  m.def("decompose_state", &decompose_state);
  m.def("measured_output", &measured_output);
  m.def("split_hamiltonian", &split_hamiltonian);

  m.def("energies", &energies);
  m.def("dissipation_operator", &dissipation_operator);
  m.def("heat_rate", &heat_rate);
  m.def("generalized_entropy", &generalized_entropy);
  m.def("entropy_rate", &entropy_rate);
  m.def("clausius_entropy_rate", &clausius_entropy_rate);
  m.def("fisher_pure", &fisher_pure);
  m.def("sld_fisher_oracle", &sld_fisher_oracle);
  m.def("heat_rate_fisher", &heat_rate_fisher);

  py::class_<BilinearControlSystem>(m, "BilinearControlSystem")
      .def(py::init([](const Operator& drift,
                       const std::vector<Operator>& controls,
                       const Operator& observable) {
             BilinearControlSystem sys;
             sys.dim = static_cast<int>(drift.rows());
             sys.drift = drift;
             sys.controls = controls;
             sys.observable = observable;
             sys.validate();
             return sys;
           }),
           py::arg("drift"), py::arg("controls"), py::arg("observable"))
      .def_readonly("dim", &BilinearControlSystem::dim)
      .def_readonly("drift", &BilinearControlSystem::drift)
      .def_readonly("controls", &BilinearControlSystem::controls)
      .def_readonly("observable", &BilinearControlSystem::observable);

  py::class_<ControlSchedule>(m, "ControlSchedule")
      .def(py::init([](double t0, double t1, const RealMatrix& amplitudes) {
             ControlSchedule s;
             s.t0 = t0;
             s.t1 = t1;
             s.n_slots = static_cast<int>(amplitudes.rows());
             s.amplitudes = amplitudes;
             return s;
           }),
           py::arg("t0"), py::arg("t1"), py::arg("amplitudes"))
      .def_readonly("t0", &ControlSchedule::t0)
      .def_readonly("t1", &ControlSchedule::t1)
      .def_readonly("n_slots", &ControlSchedule::n_slots)
      .def_readonly("amplitudes", &ControlSchedule::amplitudes);

  py::class_<ThermoSample>(m, "ThermoSample")
      .def_readonly("t", &ThermoSample::t)
      .def_readonly("obs_energy", &ThermoSample::obs_energy)
      .def_readonly("unobs_energy", &ThermoSample::unobs_energy)
      .def_readonly("entropy", &ThermoSample::entropy)
      .def_readonly("dissipation", &ThermoSample::dissipation)
      .def_readonly("output", &ThermoSample::output)
      .def_readonly("psd_violation", &ThermoSample::psd_violation)
      .def_readonly("theta", &ThermoSample::theta)
      .def_readonly("h_coeffs", &ThermoSample::h_coeffs);

  py::class_<ThermoTrajectory>(m, "ThermoTrajectory")
      .def_readonly("samples", &ThermoTrajectory::samples)
      .def_readonly("states", &ThermoTrajectory::states)
      .def_readonly("dt", &ThermoTrajectory::dt);

  m.def("propagate", &propagate);
  m.def("gaussian_schedule", &gaussian_schedule, py::arg("t0"), py::arg("t1"),
        py::arg("n_slots"), py::arg("amplitude"), py::arg("center"),
        py::arg("sigma"));
  m.def("record_thermo", &record_thermo);

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("schedule", &OptimizationResult::schedule)
      .def_readonly("objective_history", &OptimizationResult::objective_history)
      .def_readonly("terminal_output", &OptimizationResult::terminal_output)
      .def_readonly("converged", &OptimizationResult::converged)
      .def_readonly("iterations", &OptimizationResult::iterations)
      .def_readonly("seed", &OptimizationResult::seed);

  m.def(
      "grape_optimize",
      [](const BilinearControlSystem& sys, const DensityState& rho0,
         int n_slots, double horizon, int max_iters, double gradient_tol,
         std::uint64_t seed, const std::string& init_pulse, double init_scale,
         const std::string& target) {
        OptimizationConfig cfg;
        cfg.n_slots = n_slots;
        cfg.horizon = horizon;
        cfg.max_iters = max_iters;
        cfg.gradient_tol = gradient_tol;
        cfg.seed = seed;
        cfg.init_pulse =
            init_pulse == "zeros" ? InitPulse::kZeros : InitPulse::kRandom;
        cfg.init_scale = init_scale;
        cfg.target_sign =
            target == "minimize" ? TargetSign::kMinimize : TargetSign::kMaximize;
        return grape_optimize(sys, rho0, cfg);
      },
      py::arg("sys"), py::arg("rho0"), py::arg("n_slots"), py::arg("horizon"),
      py::arg("max_iters") = 200, py::arg("gradient_tol") = 1e-6,
      py::arg("seed") = 0, py::arg("init_pulse") = "random",
      py::arg("init_scale") = 1.0, py::arg("target") = "maximize");
  m.def("finite_diff_gradient", &finite_diff_gradient);
  m.def("adjoint_gradient", &adjoint_gradient);

  py::class_<CentralSpinSpec>(m, "CentralSpinSpec")
      .def(py::init([](int n_bath, double field, std::vector<double> couplings,
                       char control_axis, char measurement_axis) {
             return CentralSpinSpec{n_bath, field, std::move(couplings),
                                    control_axis, measurement_axis};
           }),
           py::arg("n_bath"), py::arg("field"), py::arg("couplings"),
           py::arg("control_axis") = 'y', py::arg("measurement_axis") = 'x')
      .def_readonly("n_bath", &CentralSpinSpec::n_bath)
      .def_readonly("field", &CentralSpinSpec::field)
      .def_readonly("couplings", &CentralSpinSpec::couplings);

  m.def("build_central_spin", &build_central_spin);
  m.def("dim_formula", &dim_formula);
  m.def("all_up_state", &all_up_state);

  m.def(
      "run_experiment_file",
      [](const std::string& config_path, bool write_outputs) {
        ExperimentReport report =
            run_experiment(load_config_file(config_path), write_outputs);
        py::dict out;
        out["dim_L"] = report.lie_report.dimension;
        out["depth_L"] = report.lie_report.max_depth;
        out["dim_V"] = report.obs_report.dimension;
        out["depth_V"] = report.obs_report.max_depth;
        out["Q"] = report.q;
        out["W"] = report.w;
        out["dS"] = report.ds;
        out["J_terminal"] = report.j_terminal;
        out["seed"] = report.seed;
        return out;
      },
      py::arg("config_path"), py::arg("write_outputs") = true,
      "Run a full experiment from a JSON config; returns the summary dict");
}
