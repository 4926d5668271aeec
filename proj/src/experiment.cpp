#include "obsthermo/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace obsthermo {

namespace {

using nlohmann::json;

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> split_csv_line(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

Operator read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open matrix file: " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) {
    throw ValidationError("empty matrix file: " + path);
  }
  const auto n = rows.size();
  Operator m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != 2 * n) {
      throw ValidationError("matrix file " + path +
                            ": expected interleaved re,im entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = Complex(rows[i][2 * j], rows[i][2 * j + 1]);
    }
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Operator& m) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write matrix file: " + path);
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_g17(m(i, j).real()) << ',' << format_g17(m(i, j).imag());
    }
    out << '\n';
  }
}

namespace {

json system_to_json(const SystemSpec& s) {
  json j;
  if (s.type == SystemSpec::Type::kCentralSpin) {
    j["type"] = "central_spin";
    j["n_bath"] = s.central.n_bath;
    j["field"] = s.central.field;
    j["couplings"] = s.central.couplings;
    j["control_axis"] = std::string(1, s.central.control_axis);
    j["measurement_axis"] = std::string(1, s.central.measurement_axis);
  } else {
    j["type"] = "matrix_files";
    j["drift"] = s.drift_path;
    j["controls"] = s.control_paths;
    j["observable"] = s.observable_path;
  }
  return j;
}

SystemSpec system_from_json(const json& j) {
  SystemSpec s;
  const std::string type = j.at("type").get<std::string>();
  if (type == "central_spin") {
    s.type = SystemSpec::Type::kCentralSpin;
    s.central.n_bath = j.at("n_bath").get<int>();
    s.central.field = j.at("field").get<double>();
    s.central.couplings = j.at("couplings").get<std::vector<double>>();
    s.central.control_axis = j.value("control_axis", std::string("y")).at(0);
    s.central.measurement_axis =
        j.value("measurement_axis", std::string("x")).at(0);
  } else if (type == "matrix_files") {
    s.type = SystemSpec::Type::kMatrixFiles;
    s.drift_path = j.at("drift").get<std::string>();
    s.control_paths = j.at("controls").get<std::vector<std::string>>();
    s.observable_path = j.at("observable").get<std::string>();
  } else {
    throw ValidationError("unknown system type: " + type);
  }
  return s;
}

json phase_to_json(const PhaseSpec& p) {
  json j;
  switch (p.type) {
    case PhaseSpec::Type::kOptimize:
      j["type"] = "optimize";
      break;
    case PhaseSpec::Type::kGaussian:
      j["type"] = "gaussian";
      j["amplitude"] = p.amplitude;
      j["center"] = p.center;
      j["sigma"] = p.sigma;
      break;
    case PhaseSpec::Type::kFixed: {
      j["type"] = "fixed";
      std::vector<std::vector<double>> rows;
      for (Eigen::Index k = 0; k < p.amplitudes.rows(); ++k) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < p.amplitudes.cols(); ++c) {
          row.push_back(p.amplitudes(k, c));
        }
        rows.push_back(std::move(row));
      }
      j["amplitudes"] = rows;
      break;
    }
  }
  return j;
}

PhaseSpec phase_from_json(const json& j) {
  PhaseSpec p;
  const std::string type = j.at("type").get<std::string>();
  if (type == "optimize") {
    p.type = PhaseSpec::Type::kOptimize;
  } else if (type == "gaussian") {
    p.type = PhaseSpec::Type::kGaussian;
    p.amplitude = j.value("amplitude", 1.0);
    p.center = j.value("center", 0.0);
    p.sigma = j.at("sigma").get<double>();
  } else if (type == "fixed") {
    p.type = PhaseSpec::Type::kFixed;
    const auto rows = j.at("amplitudes").get<std::vector<std::vector<double>>>();
    if (rows.empty()) {
      throw ValidationError("fixed phase: empty amplitude table");
    }
    p.amplitudes.resize(rows.size(), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != rows.front().size()) {
        throw ValidationError("fixed phase: ragged amplitude table");
      }
      for (std::size_t c = 0; c < rows[k].size(); ++c) {
        p.amplitudes(k, c) = rows[k][c];
      }
    }
  } else {
    throw ValidationError("unknown phase type: " + type);
  }
  return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.system = system_from_json(j.at("system"));
  cfg.tau = j.at("tau").get<double>();
  cfg.n_slots = j.at("n_slots").get<int>();
  if (!(cfg.tau > 0.0)) throw ValidationError("config: tau must be positive");
  if (cfg.n_slots < 1) throw ValidationError("config: n_slots must be >= 1");
  for (const json& jp : j.at("phases")) {
    cfg.phases.push_back(phase_from_json(jp));
  }
  if (cfg.phases.empty()) {
    throw ValidationError("config: phases must be nonempty");
  }
  if (j.contains("initial_state")) {
    const json& js = j.at("initial_state");
    const std::string type = js.at("type").get<std::string>();
    if (type == "all_up") {
      cfg.initial_state.type = InitialStateSpec::Type::kAllUp;
    } else if (type == "matrix_file") {
      cfg.initial_state.type = InitialStateSpec::Type::kMatrixFile;
      cfg.initial_state.path = js.at("path").get<std::string>();
    } else {
      throw ValidationError("unknown initial_state type: " + type);
    }
  }
  cfg.output_dir = j.value("output_dir", std::string("out"));
  cfg.rank_tol = j.value("rank_tol", kDefaultRankTol);
  cfg.observability_rounds = j.value("observability_rounds", 1);
  cfg.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("optimizer")) {
    const json& jo = j.at("optimizer");
    cfg.optimizer.max_iters = jo.value("max_iters", 500);
    cfg.optimizer.gradient_tol = jo.value("gradient_tol", 1e-6);
    cfg.optimizer.step_rule = jo.value("step_rule", std::string("backtracking"));
    if (jo.contains("init_pulse")) {
      cfg.optimizer.init_pulse = jo.at("init_pulse").at("type").get<std::string>();
      cfg.optimizer.init_scale = jo.at("init_pulse").value("scale", 1.0);
    }
    cfg.optimizer.target = jo.value("target", std::string("maximize"));
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["system"] = system_to_json(cfg.system);
  j["tau"] = cfg.tau;
  j["n_slots"] = cfg.n_slots;
  json phases = json::array();
  for (const PhaseSpec& p : cfg.phases) phases.push_back(phase_to_json(p));
  j["phases"] = phases;
  json init;
  if (cfg.initial_state.type == InitialStateSpec::Type::kAllUp) {
    init["type"] = "all_up";
  } else {
    init["type"] = "matrix_file";
    init["path"] = cfg.initial_state.path;
  }
  j["initial_state"] = init;
  j["output_dir"] = cfg.output_dir;
  j["rank_tol"] = cfg.rank_tol;
  j["observability_rounds"] = cfg.observability_rounds;
  j["seed"] = cfg.seed;
  json jo;
  jo["max_iters"] = cfg.optimizer.max_iters;
  jo["gradient_tol"] = cfg.optimizer.gradient_tol;
  jo["step_rule"] = cfg.optimizer.step_rule;
  jo["init_pulse"] = {{"type", cfg.optimizer.init_pulse},
                      {"scale", cfg.optimizer.init_scale}};
  jo["target"] = cfg.optimizer.target;
  j["optimizer"] = jo;
  return j.dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  if (const char* env = std::getenv("OBS_THERMO_RANK_TOL")) {
    cfg.rank_tol = std::stod(env);
  }
  return cfg;
}

BilinearControlSystem build_system(const SystemSpec& spec) {
  if (spec.type == SystemSpec::Type::kCentralSpin) {
    return build_central_spin(spec.central);
  }
  BilinearControlSystem sys;
  sys.drift = read_matrix_csv(spec.drift_path);
  sys.dim = static_cast<int>(sys.drift.rows());
  for (const std::string& p : spec.control_paths) {
    sys.controls.push_back(read_matrix_csv(p));
  }
  sys.observable = read_matrix_csv(spec.observable_path);
  sys.validate();
  return sys;
}

DensityState build_initial_state(const InitialStateSpec& spec, int dim) {
  if (spec.type == InitialStateSpec::Type::kAllUp) {
    int n_sites = 0;
    while ((1 << n_sites) < dim) ++n_sites;
    if ((1 << n_sites) != dim) {
      throw ValidationError("all_up initial state requires a 2^k dimension");
    }
    return all_up_state(n_sites);
  }
  return DensityState::checked(read_matrix_csv(spec.path));
}

void write_trajectory_csv(const std::string& path, const ThermoTrajectory& t) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write trajectory file: " + path);
  }
  out << "t,y,O,U,S,D\n";
  for (const ThermoSample& s : t.samples) {
    out << format_g17(s.t) << ',' << format_g17(s.output) << ','
        << format_g17(s.obs_energy) << ',' << format_g17(s.unobs_energy) << ','
        << format_g17(s.entropy) << ',' << format_g17(s.dissipation) << '\n';
  }
}

std::string summary_json(const ExperimentReport& report) {
  json j;
  j["dim_L"] = report.lie_report.dimension;
  j["depth_L"] = report.lie_report.max_depth;
  j["dim_V"] = report.obs_report.dimension;
  j["depth_V"] = report.obs_report.max_depth;
  j["Q"] = report.q;
  j["W"] = report.w;
  j["dS"] = report.ds;
  j["J_terminal"] = report.j_terminal;
  j["seed"] = report.seed;
  j["max_psd_violation"] = report.max_psd_violation;
  json phases = json::array();
  for (const PhaseReport& p : report.phases) {
    json jp;
    jp["type"] = p.type;
    jp["Q"] = p.heat;
    jp["W"] = p.work;
    jp["dS"] = p.entropy_change;
    if (p.type == "optimize") {
      jp["J_terminal"] = p.terminal_objective;
      jp["iterations"] = p.grape_iterations;
      jp["converged"] = p.grape_converged;
    }
    phases.push_back(jp);
  }
  j["phases"] = phases;
  return j.dump(2) + "\n";
}

namespace {

/// Reraises failures from one pipeline step with the phase and step named,
/// keeping the error category (and thus the CLI exit code) intact.
template <typename F>
auto annotated_step(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what());
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                bool write_outputs) {
  BilinearControlSystem sys = build_system(cfg.system);

  std::vector<Operator> generators;
  generators.push_back(sys.drift);
  for (const Operator& c : sys.controls) generators.push_back(c);
  auto [lie, lie_report] = close_algebra(generators, cfg.rank_tol);
  auto [v_raw, obs_report] = observability_space(
      lie, sys.observable, cfg.rank_tol, cfg.observability_rounds);
  OperatorBasis v = gram_schmidt(v_raw);

  ExperimentReport report;
  report.lie_report = lie_report;
  report.obs_report = obs_report;
  report.seed = cfg.seed;

  DensityState rho = build_initial_state(cfg.initial_state, sys.dim);
  bool headline_set = false;
  for (std::size_t p = 0; p < cfg.phases.size(); ++p) {
    const PhaseSpec& phase = cfg.phases[p];
    const double t0 = cfg.tau * static_cast<double>(p);
    const double t1 = t0 + cfg.tau;

    const std::string where = "phase " + std::to_string(p);
    ControlSchedule sched;
    PhaseReport phase_report;
    if (phase.type == PhaseSpec::Type::kOptimize) {
      phase_report.type = "optimize";
      OptimizationConfig ocfg;
      ocfg.n_slots = cfg.n_slots;
      ocfg.horizon = cfg.tau;
      ocfg.max_iters = cfg.optimizer.max_iters;
      ocfg.gradient_tol = cfg.optimizer.gradient_tol;
      ocfg.step_rule = cfg.optimizer.step_rule == "fixed"
                           ? StepRule::kFixed
                           : StepRule::kBacktracking;
      ocfg.init_pulse = cfg.optimizer.init_pulse == "zeros"
                            ? InitPulse::kZeros
                            : InitPulse::kRandom;
      ocfg.init_scale = cfg.optimizer.init_scale;
      ocfg.target_sign = cfg.optimizer.target == "minimize"
                             ? TargetSign::kMinimize
                             : TargetSign::kMaximize;
      ocfg.seed = cfg.seed;
      OptimizationResult result = annotated_step(
          where + ", pulse optimization",
          [&] { return grape_optimize(sys, rho, ocfg); });
      sched = result.schedule;
      sched.t0 = t0;
      sched.t1 = t1;
      phase_report.terminal_objective = result.terminal_output;
      phase_report.grape_iterations = result.iterations;
      phase_report.grape_converged = result.converged;
      report.j_terminal = result.terminal_output;
    } else if (phase.type == PhaseSpec::Type::kGaussian) {
      phase_report.type = "gaussian";
      sched = annotated_step(where + ", schedule construction", [&] {
        if (sys.n_controls() != 1) {
          throw ValidationError(
              "gaussian phase requires exactly one control Hamiltonian");
        }
        return gaussian_schedule(t0, t1, cfg.n_slots, phase.amplitude,
                                 phase.center, phase.sigma);
      });
    } else {
      phase_report.type = "fixed";
      sched.t0 = t0;
      sched.t1 = t1;
      sched.n_slots = cfg.n_slots;
      sched.amplitudes = phase.amplitudes;
      annotated_step(where + ", schedule construction",
                     [&] { sched.validate(sys.n_controls()); });
    }

    std::vector<DensityState> states = annotated_step(
        where + ", propagation", [&] { return propagate(sys, sched, rho); });
    ThermoTrajectory traj =
        annotated_step(where + ", thermodynamic recording",
                       [&] { return record_thermo(sys, v, states, sched); });
    rho = states.back();

    phase_report.heat =
        traj.samples.back().unobs_energy - traj.samples.front().unobs_energy;
    phase_report.work =
        traj.samples.back().obs_energy - traj.samples.front().obs_energy;
    phase_report.entropy_change =
        traj.samples.back().entropy - traj.samples.front().entropy;
    for (const ThermoSample& smp : traj.samples) {
      report.max_psd_violation =
          std::max(report.max_psd_violation, smp.psd_violation);
    }
    if (!headline_set &&
        (phase.type == PhaseSpec::Type::kOptimize ||
         p + 1 == cfg.phases.size())) {
      report.q = phase_report.heat;
      report.w = phase_report.work;
      report.ds = phase_report.entropy_change;
      headline_set = true;
    }
    report.phases.push_back(phase_report);
    report.trajectories.push_back(std::move(traj));
    report.schedules.push_back(std::move(sched));
  }
  if (report.j_terminal == 0.0 && !report.trajectories.empty()) {
    report.j_terminal = report.trajectories.back().samples.back().output;
  }

  if (write_outputs) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    for (std::size_t p = 0; p < report.trajectories.size(); ++p) {
      write_trajectory_csv(
          cfg.output_dir + "/phase" + std::to_string(p) + ".csv",
          report.trajectories[p]);
    }
    std::ofstream out(cfg.output_dir + "/summary.json");
    out << summary_json(report);
  }
  return report;
}

}  // namespace obsthermo
