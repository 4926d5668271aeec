#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obsthermo/central_spin.hpp"
#include "obsthermo/grape.hpp"
#include "obsthermo/lie_closure.hpp"

namespace obsthermo {

/// Matrix on disk: CSV of interleaved real,imag entries, row-major.
Operator read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Operator& m);

struct SystemSpec {
  enum class Type { kCentralSpin, kMatrixFiles };
  Type type = Type::kCentralSpin;
  CentralSpinSpec central;
  std::string drift_path;
  std::vector<std::string> control_paths;
  std::string observable_path;
};

struct PhaseSpec {
  enum class Type { kOptimize, kGaussian, kFixed };
  Type type = Type::kOptimize;
  // gaussian
  double amplitude = 1.0;
  double center = 0.0;
  double sigma = 0.1;
  // fixed
  RealMatrix amplitudes;
};

struct InitialStateSpec {
  enum class Type { kAllUp, kMatrixFile };
  Type type = Type::kAllUp;
  std::string path;
};

struct OptimizerSettings {
  int max_iters = 500;
  double gradient_tol = 1e-6;
  std::string step_rule = "backtracking";
  std::string init_pulse = "random";
  double init_scale = 1.0;
  std::string target = "maximize";
};

/// Full experiment description; serializes to a canonical JSON document
/// (sorted keys) so that serialize(parse(text)) round-trips byte-for-byte.
struct ExperimentConfig {
  SystemSpec system;
  double tau = 1.0;
  int n_slots = 1000;
  std::vector<PhaseSpec> phases;
  InitialStateSpec initial_state;
  std::string output_dir = "out";
  double rank_tol = kDefaultRankTol;
  /// Bracket rounds used to build the observability space; 1 is the
  /// first-order space span{S'} + [L, S'] used by the central-spin
  /// experiment, -1 iterates to the closed space.
  int observability_rounds = 1;
  OptimizerSettings optimizer;
  std::uint64_t seed = 0;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& cfg);

/// Reads a config file and applies the OBS_THERMO_RANK_TOL environment
/// override when present.
ExperimentConfig load_config_file(const std::string& path);

struct PhaseReport {
  std::string type;
  double heat = 0.0;            // U(end) - U(start)
  double work = 0.0;            // O(end) - O(start)
  double entropy_change = 0.0;  // S(end) - S(start)
  double terminal_objective = 0.0;
  int grape_iterations = 0;
  bool grape_converged = false;
};

struct ExperimentReport {
  ClosureReport lie_report;
  ClosureReport obs_report;
  std::vector<PhaseReport> phases;
  double q = 0.0;   // headline values: the optimize phase when present,
  double w = 0.0;   // otherwise the first phase
  double ds = 0.0;
  double j_terminal = 0.0;
  std::uint64_t seed = 0;
  double max_psd_violation = 0.0;
  std::vector<ThermoTrajectory> trajectories;
  std::vector<ControlSchedule> schedules;
};

BilinearControlSystem build_system(const SystemSpec& spec);
DensityState build_initial_state(const InitialStateSpec& spec, int dim);

/// Executes the full pipeline: build system, close L, build V, Gram-Schmidt,
/// run each phase (optimizing or evaluating its schedule), record the thermo
/// series, and - when write_outputs is set - emit one CSV per phase plus a
/// JSON summary under cfg.output_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                bool write_outputs = true);

std::string summary_json(const ExperimentReport& report);
void write_trajectory_csv(const std::string& path, const ThermoTrajectory& t);

}  // namespace obsthermo
