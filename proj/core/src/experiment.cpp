#include "pathtrack/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace pathtrack {
namespace {

using nlohmann::json;

constexpr const char* kLqrName = "lqr";
constexpr const char* kIlqrName = "ilqr";

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* key) {
          return item.key() == key;
        }) == allowed.end()) {
      throw ConfigError("config: unknown key \"" + item.key() + "\" in section \"" + section +
                        "\"");
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, const std::string& section, T fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value for \"" + std::string(key) + "\" in section \"" +
                      section + "\"");
  }
}

Vector get_vector(const json& obj, const char* key, const std::string& section,
                  const Vector& fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  std::vector<double> raw;
  try {
    raw = obj.at(key).get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError("config: \"" + std::string(key) + "\" in section \"" + section +
                      "\" must be an array of numbers");
  }
  return Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size()));
}

Vector padded_to_state_dim(const Vector& v, const char* key) {
  if (v.size() > RobotState::kDim) {
    throw ConfigError("config: \"" + std::string(key) + "\" has more than 7 entries");
  }
  Vector out = Vector::Zero(RobotState::kDim);
  out.head(v.size()) = v;
  return out;
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json metrics_json(const TrackingMetrics& m) {
  return json{{"pos_rmse", m.pos_rmse},
              {"heading_rmse", m.heading_rmse},
              {"max_pos_err", m.max_pos_err},
              {"terminal_pos_err", m.terminal_pos_err}};
}

json controller_json(const ControllerReport& report) {
  json out{{"name", report.name},
           {"metrics", metrics_json(report.metrics)},
           {"total_cost", report.total_cost},
           {"duration_s", report.duration_s}};
  if (report.name == kIlqrName) {
    out["converged"] = report.converged;
    out["iterations"] = report.iterations;
    out["cost_history"] = report.cost_history;
    json trace = json::array();
    for (const IterationRecord& rec : report.trace) {
      trace.push_back(json{{"iteration", rec.iteration},
                           {"cost_before", rec.cost_before},
                           {"cost_after", rec.cost_after},
                           {"alpha", rec.alpha},
                           {"mu", rec.mu},
                           {"accepted", rec.accepted}});
    }
    out["trace"] = std::move(trace);
  }
  return out;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) {
    throw IoError("cannot open " + file.string() + " for writing");
  }
  out << text;
  if (!out) {
    throw IoError("write failed for " + file.string());
  }
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

void warn_spacing(const ExperimentConfig& config, const ReferencePath& ref) {
  if (config.v_max <= 0.0) {
    return;
  }
  const auto violations = spacing_violations(ref, config.v_max);
  if (!violations.empty()) {
    std::cerr << "warning: " << violations.size() << " reference segment(s) exceed v_max * dt = "
              << config.v_max * ref.dt() << " m (first at index " << violations.front() << ")\n";
  }
}

double score_with(Trajectory& traj, const TrackingCost& cost) {
  std::vector<Vector> X;
  X.reserve(traj.states.size());
  for (const RobotState& s : traj.states) {
    X.push_back(s.to_vector());
  }
  std::vector<Vector> U;
  U.reserve(traj.controls.size());
  for (const ControlInput& u : traj.controls) {
    U.push_back(u.to_vector());
  }
  traj.step_costs.clear();
  traj.step_costs.reserve(traj.states.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < U.size(); ++k) {
    const double c = cost.running(static_cast<Eigen::Index>(k), X[k], U[k]);
    traj.step_costs.push_back(c);
    sum += c;
  }
  const double cf = cost.final(X.back());
  traj.step_costs.push_back(cf);
  return sum + cf;
}

ControllerReport run_lqr_controller(const ExperimentConfig& config, const ReferencePath& ref,
                                    const TrackingCost& cost, const RobotState& x0,
                                    Trajectory* out_traj) {
  ControllerReport report;
  report.name = kLqrName;
  const double start = now_seconds();
  const DiffDriveModel model(ref.dt());
  const auto ops = linearize_along(ref.state_vectors(), ref.control_vectors(), model);
  const auto gains = tv_lqr_gains(ops, cost.weights());
  Trajectory traj = track(x0, ref, ref.controls(), gains, model, config.substeps);
  report.duration_s = now_seconds() - start;
  report.total_cost = score_with(traj, cost);
  report.metrics = tracking_metrics(traj.states, ref);
  if (out_traj != nullptr) {
    *out_traj = std::move(traj);
  }
  return report;
}

ControllerReport run_ilqr_controller(const ExperimentConfig& config, const ReferencePath& ref,
                                     const TrackingCost& cost, const RobotState& x0,
                                     Trajectory* out_traj) {
  ControllerReport report;
  report.name = kIlqrName;
  const double start = now_seconds();
  const DiffDriveModel model(ref.dt());
  const IlqrSolver solver(model, cost, config.solver);
  const Solution sol = solver.solve(x0.to_vector(), ref.control_vectors());
  report.duration_s = now_seconds() - start;

  Trajectory traj;
  traj.states.reserve(sol.X.size());
  traj.controls.reserve(sol.U.size());
  for (const Vector& x : sol.X) {
    traj.states.push_back(RobotState::from_vector(x));
  }
  for (const Vector& u : sol.U) {
    traj.controls.push_back(ControlInput::from_vector(u));
  }
  report.total_cost = score_with(traj, cost);
  report.metrics = tracking_metrics(traj.states, ref);
  report.converged = sol.converged;
  report.iterations = sol.iterations;
  report.cost_history = sol.cost_history;
  report.trace = sol.trace;
  if (out_traj != nullptr) {
    *out_traj = std::move(traj);
  }
  return report;
}

ControllerReport run_controller(const std::string& name, const ExperimentConfig& config,
                                const ReferencePath& ref, const TrackingCost& cost,
                                const RobotState& x0, Trajectory* out_traj) {
  if (name == kLqrName) {
    return run_lqr_controller(config, ref, cost, x0, out_traj);
  }
  if (name == kIlqrName) {
    return run_ilqr_controller(config, ref, cost, x0, out_traj);
  }
  throw ConfigError("config: unknown controller \"" + name + "\"");
}

std::string gnuplot_script(const std::vector<std::string>& trajectory_files) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key outside\n"
      << "set xlabel 'x [m]'\n"
      << "set ylabel 'y [m]'\n"
      << "set size ratio -1\n"
      << "plot ";
  for (std::size_t i = 0; i < trajectory_files.size(); ++i) {
    if (i == 0) {
      out << "'" << trajectory_files[i] << "' using 7:8 with lines title 'reference', \\\n     ";
    }
    out << "'" << trajectory_files[i] << "' using 2:3 with lines title '"
        << std::filesystem::path(trajectory_files[i]).stem().string() << "'";
    if (i + 1 < trajectory_files.size()) {
      out << ", \\\n     ";
    }
  }
  out << "\n";
  return out.str();
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  const CostWeights defaults = CostWeights::robot_defaults();
  q_diag = defaults.Q.diagonal();
  r_diag = defaults.R.diagonal();
  qf_diag = defaults.Qf.diagonal();
}

CostWeights ExperimentConfig::weights() const {
  try {
    return CostWeights::diagonal(q_diag, r_diag, qf_diag);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ReferencePath ExperimentConfig::make_path() const {
  if (bell.has_value()) {
    return generate_bell(*bell);
  }
  return load_path_csv(path_csv, path_csv_dt);
}

void ExperimentConfig::validate() const {
  if (!bell.has_value() && path_csv.empty()) {
    throw ConfigError("config: no path source configured");
  }
  if (bell.has_value()) {
    if (bell->n_points < 2) {
      throw ConfigError("config: path.n_points must be at least 2");
    }
    if (!(bell->length > 0.0) || !(bell->width_sigma > 0.0) || !(bell->dt > 0.0)) {
      throw ConfigError("config: path.length, path.width_sigma and path.dt must be positive");
    }
  } else if (!(path_csv_dt > 0.0)) {
    throw ConfigError("config: path.dt must be positive");
  }
  if (q_diag.size() != RobotState::kDim || qf_diag.size() != RobotState::kDim ||
      r_diag.size() != ControlInput::kDim) {
    throw ConfigError("config: weights must provide 7 state and 2 control entries");
  }
  static_cast<void>(weights());
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (substeps < 1) {
    throw ConfigError("config: controller.substeps must be at least 1");
  }
  for (const std::string& name : compare_pair) {
    if (name != kLqrName && name != kIlqrName) {
      throw ConfigError("config: compare_pair entries must be \"lqr\" or \"ilqr\"");
    }
  }
  if (perturbation.offset.size() != RobotState::kDim ||
      perturbation.stddev.size() != RobotState::kDim) {
    throw ConfigError("config: perturbation vectors must have at most 7 entries");
  }
  if ((perturbation.stddev.array() < 0.0).any()) {
    throw ConfigError("config: perturbation.std entries must be non-negative");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  check_keys(root, "(top level)", {"path", "weights", "solver", "controller", "perturbation"});

  ExperimentConfig config;

  if (root.contains("path")) {
    const json& path = root.at("path");
    if (!path.is_object()) {
      throw ConfigError("config: \"path\" must be an object");
    }
    if (path.contains("csv")) {
      check_keys(path, "path", {"csv", "dt", "v_max"});
      config.bell.reset();
      config.path_csv = get_or<std::string>(path, "csv", "path", "");
      config.path_csv_dt = get_or<double>(path, "dt", "path", 0.1);
    } else {
      check_keys(path, "path",
                 {"length", "height", "center", "width_sigma", "incline", "n_points", "dt",
                  "v_max"});
      BellPathParams bell;
      bell.length = get_or<double>(path, "length", "path", bell.length);
      bell.height = get_or<double>(path, "height", "path", bell.height);
      bell.center = get_or<double>(path, "center", "path", bell.center);
      bell.width_sigma = get_or<double>(path, "width_sigma", "path", bell.width_sigma);
      bell.incline = get_or<double>(path, "incline", "path", bell.incline);
      bell.n_points = get_or<int>(path, "n_points", "path", bell.n_points);
      bell.dt = get_or<double>(path, "dt", "path", bell.dt);
      config.bell = bell;
    }
    config.v_max = get_or<double>(path, "v_max", "path", 0.0);
  }

  if (root.contains("weights")) {
    const json& weights = root.at("weights");
    if (!weights.is_object()) {
      throw ConfigError("config: \"weights\" must be an object");
    }
    check_keys(weights, "weights", {"q_diag", "r_diag", "qf_diag"});
    config.q_diag = get_vector(weights, "q_diag", "weights", config.q_diag);
    config.r_diag = get_vector(weights, "r_diag", "weights", config.r_diag);
    config.qf_diag = get_vector(weights, "qf_diag", "weights", 10.0 * config.q_diag);
  }

  if (root.contains("solver")) {
    const json& solver = root.at("solver");
    if (!solver.is_object()) {
      throw ConfigError("config: \"solver\" must be an object");
    }
    check_keys(solver, "solver",
               {"max_iterations", "convergence_threshold", "mu_init", "mu_min", "mu_max",
                "mu_factor", "alphas"});
    config.solver.max_iterations =
        get_or<int>(solver, "max_iterations", "solver", config.solver.max_iterations);
    config.solver.convergence_threshold = get_or<double>(solver, "convergence_threshold", "solver",
                                                         config.solver.convergence_threshold);
    config.solver.mu_init = get_or<double>(solver, "mu_init", "solver", config.solver.mu_init);
    config.solver.mu_min = get_or<double>(solver, "mu_min", "solver", config.solver.mu_min);
    config.solver.mu_max = get_or<double>(solver, "mu_max", "solver", config.solver.mu_max);
    config.solver.mu_factor =
        get_or<double>(solver, "mu_factor", "solver", config.solver.mu_factor);
    config.solver.alphas =
        get_or<std::vector<double>>(solver, "alphas", "solver", config.solver.alphas);
  }

  if (root.contains("controller")) {
    const json& controller = root.at("controller");
    if (!controller.is_object()) {
      throw ConfigError("config: \"controller\" must be an object");
    }
    check_keys(controller, "controller", {"choice", "substeps", "control_penalty", "compare_pair"});
    const std::string choice = get_or<std::string>(controller, "choice", "controller", "both");
    if (choice == "lqr") {
      config.controller = ControllerChoice::kLqr;
    } else if (choice == "ilqr") {
      config.controller = ControllerChoice::kIlqr;
    } else if (choice == "both") {
      config.controller = ControllerChoice::kBoth;
    } else {
      throw ConfigError("config: controller.choice must be \"lqr\", \"ilqr\" or \"both\"");
    }
    config.substeps = get_or<int>(controller, "substeps", "controller", config.substeps);
    const std::string penalty =
        get_or<std::string>(controller, "control_penalty", "controller", "deviation");
    if (penalty == "deviation") {
      config.control_penalty = ControlPenalty::kDeviation;
    } else if (penalty == "absolute") {
      config.control_penalty = ControlPenalty::kAbsolute;
    } else {
      throw ConfigError("config: controller.control_penalty must be \"deviation\" or \"absolute\"");
    }
    const auto pair = get_or<std::vector<std::string>>(
        controller, "compare_pair", "controller",
        {config.compare_pair[0], config.compare_pair[1]});
    if (pair.size() != 2) {
      throw ConfigError("config: controller.compare_pair must list exactly two controllers");
    }
    config.compare_pair = {pair[0], pair[1]};
  }

  if (root.contains("perturbation")) {
    const json& pert = root.at("perturbation");
    if (!pert.is_object()) {
      throw ConfigError("config: \"perturbation\" must be an object");
    }
    check_keys(pert, "perturbation", {"offset", "std", "seed"});
    config.perturbation.offset = padded_to_state_dim(
        get_vector(pert, "offset", "perturbation", config.perturbation.offset), "offset");
    config.perturbation.stddev = padded_to_state_dim(
        get_vector(pert, "std", "perturbation", config.perturbation.stddev), "std");
    config.perturbation.seed =
        get_or<std::uint64_t>(pert, "seed", "perturbation", config.perturbation.seed);
  }

  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("config: cannot open " + file.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_json(const ExperimentConfig& config) {
  json path;
  if (config.bell.has_value()) {
    path = json{{"length", config.bell->length},     {"height", config.bell->height},
                {"center", config.bell->center},     {"width_sigma", config.bell->width_sigma},
                {"incline", config.bell->incline},   {"n_points", config.bell->n_points},
                {"dt", config.bell->dt}};
  } else {
    path = json{{"csv", config.path_csv.string()}, {"dt", config.path_csv_dt}};
  }
  if (config.v_max > 0.0) {
    path["v_max"] = config.v_max;
  }

  const char* choice = config.controller == ControllerChoice::kLqr
                           ? "lqr"
                           : (config.controller == ControllerChoice::kIlqr ? "ilqr" : "both");

  json root{
      {"path", std::move(path)},
      {"weights",
       {{"q_diag", to_std(config.q_diag)},
        {"r_diag", to_std(config.r_diag)},
        {"qf_diag", to_std(config.qf_diag)}}},
      {"solver",
       {{"max_iterations", config.solver.max_iterations},
        {"convergence_threshold", config.solver.convergence_threshold},
        {"mu_init", config.solver.mu_init},
        {"mu_min", config.solver.mu_min},
        {"mu_max", config.solver.mu_max},
        {"mu_factor", config.solver.mu_factor},
        {"alphas", config.solver.alphas}}},
      {"controller",
       {{"choice", choice},
        {"substeps", config.substeps},
        {"control_penalty",
         config.control_penalty == ControlPenalty::kDeviation ? "deviation" : "absolute"},
        {"compare_pair", {config.compare_pair[0], config.compare_pair[1]}}}},
      {"perturbation",
       {{"offset", to_std(config.perturbation.offset)},
        {"std", to_std(config.perturbation.stddev)},
        {"seed", config.perturbation.seed}}}};
  return root.dump(2);
}

RobotState perturbed_start(const RobotState& nominal, const PerturbationConfig& perturbation) {
  Vector delta = perturbation.offset;
  if ((perturbation.stddev.array() > 0.0).any()) {
    std::mt19937_64 rng(perturbation.seed);
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      if (perturbation.stddev(i) > 0.0) {
        std::normal_distribution<double> noise(0.0, perturbation.stddev(i));
        delta(i) += noise(rng);
      }
    }
  }
  return RobotState::from_vector(nominal.to_vector() + delta);
}

void write_trajectory_csv(const Trajectory& traj, const ReferencePath& ref,
                          const std::filesystem::path& file) {
  if (traj.states.size() != traj.controls.size() + 1 || traj.states.size() != ref.size()) {
    throw std::invalid_argument("write_trajectory_csv: trajectory does not match the reference");
  }
  std::ofstream out(file);
  if (!out) {
    throw IoError("cannot open " + file.string() + " for writing");
  }
  out << "t,x,y,theta,v,omega,x_ref,y_ref,theta_ref,u_v,u_omega\n";
  char buf[352];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const RobotState& s = traj.states[i];
    const ControlInput& u = traj.controls[std::min(i, traj.controls.size() - 1)];
    const Eigen::Vector2d& p = ref.points()[i];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<double>(i) * ref.dt(), s.x, s.y, s.theta, s.v, s.omega, p.x(), p.y(),
                  ref.headings()[i], u.v_cmd, u.omega_cmd);
    out << buf;
  }
  if (!out) {
    throw IoError("write failed for " + file.string());
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open " + file.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y,theta,v,omega,x_ref,y_ref,theta_ref,u_v,u_omega") {
    throw IoError("read_trajectory_csv: unexpected header in " + file.string());
  }
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    double vals[11];
    char comma = ',';
    row >> vals[0];
    for (int k = 1; k < 11 && row; ++k) {
      row >> comma >> vals[k];
    }
    if (!row || comma != ',') {
      throw IoError("read_trajectory_csv: malformed row " + std::to_string(lineno) + " in " +
                    file.string());
    }
    RobotState s;
    s.x = vals[1];
    s.y = vals[2];
    s.theta = vals[3];
    s.v = vals[4];
    s.omega = vals[5];
    if (!traj.states.empty()) {
      s.dv = s.v - traj.states.back().v;
      s.domega = s.omega - traj.states.back().omega;
    }
    traj.states.push_back(s);
    traj.controls.push_back(ControlInput{vals[9], vals[10]});
  }
  if (traj.states.size() < 2) {
    throw IoError("read_trajectory_csv: need at least two rows in " + file.string());
  }
  traj.controls.pop_back();  // the final row repeats the last control
  return traj;
}

RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         bool emit_gnuplot) {
  config.validate();
  const ReferencePath ref = config.make_path();
  warn_spacing(config, ref);
  const TrackingCost cost = TrackingCost::for_path(ref, config.weights(), config.control_penalty);
  const RobotState x0 = perturbed_start(ref.states().front(), config.perturbation);

  RunReport report;
  report.config_echo = config_json(config);
  report.path_arc_length = ref.arc_length();

  std::vector<std::pair<std::string, Trajectory>> trajectories;
  const bool want_lqr =
      config.controller == ControllerChoice::kLqr || config.controller == ControllerChoice::kBoth;
  const bool want_ilqr =
      config.controller == ControllerChoice::kIlqr || config.controller == ControllerChoice::kBoth;
  if (want_lqr) {
    Trajectory traj;
    report.controllers.push_back(run_lqr_controller(config, ref, cost, x0, &traj));
    trajectories.emplace_back(kLqrName, std::move(traj));
  }
  if (want_ilqr) {
    Trajectory traj;
    report.controllers.push_back(run_ilqr_controller(config, ref, cost, x0, &traj));
    trajectories.emplace_back(kIlqrName, std::move(traj));
  }

  ensure_directory(out_dir);
  std::vector<std::string> files;
  for (const auto& [name, traj] : trajectories) {
    const std::string filename = "trajectory_" + name + ".csv";
    write_trajectory_csv(traj, ref, out_dir / filename);
    files.push_back(filename);
  }

  json doc{{"config", json::parse(report.config_echo)},
           {"path", {{"arc_length", report.path_arc_length},
                     {"n_points", ref.size()},
                     {"dt", ref.dt()}}}};
  doc["controllers"] = json::array();
  for (const ControllerReport& c : report.controllers) {
    doc["controllers"].push_back(controller_json(c));
  }
  write_text_file(out_dir / "report.json", doc.dump(2) + "\n");
  if (emit_gnuplot) {
    write_text_file(out_dir / "plot.gp", gnuplot_script(files));
  }
  return report;
}

CompareReport compare_experiment(const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir,
                                 std::span<const int> sweep_n, bool emit_gnuplot) {
  config.validate();
  if (config.controller != ControllerChoice::kBoth) {
    throw ConfigError("config: compare requires controller.choice \"both\"");
  }
  if (!sweep_n.empty() && !config.bell.has_value()) {
    throw ConfigError("config: point-count sweeps need a generated path");
  }

  const ReferencePath ref = config.make_path();
  warn_spacing(config, ref);
  const TrackingCost cost = TrackingCost::for_path(ref, config.weights(), config.control_penalty);

  CompareReport report;
  report.config_echo = config_json(config);
  report.pair = config.compare_pair;

  struct Case {
    std::string label;
    Vector offset;
  };
  std::vector<Case> cases;
  cases.push_back({"nominal", Vector::Zero(RobotState::kDim)});
  const double dpos = 0.1;
  const double dtheta = 0.1;
  for (const auto& [label, index, amount] :
       {std::tuple<const char*, int, double>{"+x", 0, dpos},
        {"-x", 0, -dpos},
        {"+y", 1, dpos},
        {"-y", 1, -dpos},
        {"+theta", 2, dtheta},
        {"-theta", 2, -dtheta}}) {
    Vector offset = Vector::Zero(RobotState::kDim);
    offset(index) = amount;
    cases.push_back({label, offset});
  }

  Trajectory nominal_first;
  Trajectory nominal_second;
  for (const Case& c : cases) {
    PerturbationConfig pert = config.perturbation;
    pert.offset += c.offset;
    const RobotState x0 = perturbed_start(ref.states().front(), pert);
    CompareEntry entry;
    entry.label = c.label;
    const bool keep = c.label == "nominal";
    entry.first = run_controller(report.pair[0], config, ref, cost, x0,
                                 keep ? &nominal_first : nullptr);
    entry.second = run_controller(report.pair[1], config, ref, cost, x0,
                                  keep ? &nominal_second : nullptr);
    entry.cost_delta = entry.second.total_cost - entry.first.total_cost;
    entry.pos_rmse_delta = entry.second.metrics.pos_rmse - entry.first.metrics.pos_rmse;
    report.entries.push_back(std::move(entry));
  }

  for (int n : sweep_n) {
    if (n < 2) {
      throw ConfigError("config: sweep point counts must be at least 2");
    }
    // same physical duration: rescale dt to the new point count
    BellPathParams scaled = *config.bell;
    const double duration = scaled.dt * static_cast<double>(scaled.n_points - 1);
    scaled.n_points = n;
    scaled.dt = duration / static_cast<double>(n - 1);
    const ReferencePath sweep_ref = generate_bell(scaled);
    const TrackingCost sweep_cost =
        TrackingCost::for_path(sweep_ref, config.weights(), config.control_penalty);
    const RobotState x0 = perturbed_start(sweep_ref.states().front(), config.perturbation);
    SweepEntry entry;
    entry.n_points = n;
    entry.dt = scaled.dt;
    const ControllerReport first =
        run_controller(report.pair[0], config, sweep_ref, sweep_cost, x0, nullptr);
    const ControllerReport second =
        run_controller(report.pair[1], config, sweep_ref, sweep_cost, x0, nullptr);
    entry.first_pos_rmse = first.metrics.pos_rmse;
    entry.second_pos_rmse = second.metrics.pos_rmse;
    entry.first_cost = first.total_cost;
    entry.second_cost = second.total_cost;
    report.sweep.push_back(entry);
  }

  ensure_directory(out_dir);
  const std::string first_file = "trajectory_" + report.pair[0] + ".csv";
  const std::string second_file = "trajectory_" + report.pair[1] + ".csv";
  write_trajectory_csv(nominal_first, ref, out_dir / first_file);
  write_trajectory_csv(nominal_second, ref, out_dir / second_file);

  json doc{{"config", json::parse(report.config_echo)},
           {"pair", {report.pair[0], report.pair[1]}}};
  doc["entries"] = json::array();
  for (const CompareEntry& entry : report.entries) {
    doc["entries"].push_back(json{{"label", entry.label},
                                  {report.pair[0], controller_json(entry.first)},
                                  {report.pair[1], controller_json(entry.second)},
                                  {"cost_delta", entry.cost_delta},
                                  {"pos_rmse_delta", entry.pos_rmse_delta}});
  }
  if (!report.sweep.empty()) {
    doc["sweep"] = json::array();
    std::ofstream sweep_csv(out_dir / "sweep.csv");
    if (!sweep_csv) {
      throw IoError("cannot open " + (out_dir / "sweep.csv").string() + " for writing");
    }
    sweep_csv << "n_points,dt," << report.pair[0] << "_pos_rmse," << report.pair[1]
              << "_pos_rmse," << report.pair[0] << "_cost," << report.pair[1] << "_cost\n";
    char buf[192];
    for (const SweepEntry& entry : report.sweep) {
      doc["sweep"].push_back(json{{"n_points", entry.n_points},
                                  {"dt", entry.dt},
                                  {report.pair[0] + "_pos_rmse", entry.first_pos_rmse},
                                  {report.pair[1] + "_pos_rmse", entry.second_pos_rmse},
                                  {report.pair[0] + "_cost", entry.first_cost},
                                  {report.pair[1] + "_cost", entry.second_cost}});
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", entry.n_points,
                    entry.dt, entry.first_pos_rmse, entry.second_pos_rmse, entry.first_cost,
                    entry.second_cost);
      sweep_csv << buf;
    }
    if (!sweep_csv) {
      throw IoError("write failed for " + (out_dir / "sweep.csv").string());
    }
  }
  write_text_file(out_dir / "compare.json", doc.dump(2) + "\n");
  if (emit_gnuplot) {
    std::vector<std::string> files{first_file};
    if (second_file != first_file) {
      files.push_back(second_file);
    }
    write_text_file(out_dir / "plot.gp", gnuplot_script(files));
  }
  return report;
}

void generate_path_files(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const ReferencePath ref = config.make_path();
  warn_spacing(config, ref);
  ensure_directory(out_dir);
  save_path_csv(ref, out_dir / "path.csv");
}

}  // namespace pathtrack
