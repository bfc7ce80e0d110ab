#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathtrack/cost.hpp"
#include "pathtrack/errors.hpp"
#include "pathtrack/ilqr.hpp"
#include "pathtrack/lqr.hpp"
#include "pathtrack/path.hpp"

namespace pathtrack {

enum class ControllerChoice { kLqr, kIlqr, kBoth };

/// Start-state perturbation: a fixed offset plus optional zero-mean Gaussian
/// noise drawn once per run from the seed. Both vectors have one entry per
/// state component.
struct PerturbationConfig {
  Vector offset{Vector::Zero(RobotState::kDim)};
  Vector stddev{Vector::Zero(RobotState::kDim)};
  std::uint64_t seed{0};
};

/// Everything a run needs. A config parses from JSON, fills defaults for
/// missing keys, and rejects unknown keys; the report echoes the effective
/// values so a run can be reproduced from its report alone.
struct ExperimentConfig {
  /// Path source: a generated bell by default, or a CSV file when bell is
  /// disengaged.
  std::optional<BellPathParams> bell{BellPathParams{}};
  std::filesystem::path path_csv;
  double path_csv_dt{0.1};
  /// When positive, consecutive reference points farther apart than
  /// v_max * dt draw a warning on stderr (never an error).
  double v_max{0.0};

  Vector q_diag;
  Vector r_diag;
  Vector qf_diag;
  ControlPenalty control_penalty{ControlPenalty::kDeviation};

  SolverOptions solver;
  ControllerChoice controller{ControllerChoice::kBoth};
  /// Plant substeps per reference interval for closed-loop tracking.
  int substeps{1};
  /// Which two controllers a compare run pits against each other; deltas are
  /// reported as second minus first.
  std::array<std::string, 2> compare_pair{{"lqr", "ilqr"}};

  PerturbationConfig perturbation;

  ExperimentConfig();

  [[nodiscard]] CostWeights weights() const;
  [[nodiscard]] ReferencePath make_path() const;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Parses a JSON config document. Unknown sections or keys, wrong types and
/// out-of-range values all throw ConfigError.
[[nodiscard]] ExperimentConfig parse_config(const std::string& json_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& file);

/// The effective settings as a JSON document (all defaults materialized).
[[nodiscard]] std::string config_json(const ExperimentConfig& config);

/// Applies the configured offset and seeded noise to the reference start.
[[nodiscard]] RobotState perturbed_start(const RobotState& nominal,
                                         const PerturbationConfig& perturbation);

/// Per-controller outcome of one tracking run.
struct ControllerReport {
  std::string name;
  TrackingMetrics metrics;
  double total_cost{0.0};
  double duration_s{0.0};
  bool converged{true};
  int iterations{0};
  // filled for the iterative solver only
  std::vector<double> cost_history;
  std::vector<IterationRecord> trace;
};

struct RunReport {
  std::string config_echo;
  double path_arc_length{0.0};
  std::vector<ControllerReport> controllers;
};

struct CompareEntry {
  std::string label;
  ControllerReport first;
  ControllerReport second;
  /// second minus first; negative means the second controller was cheaper.
  double cost_delta{0.0};
  double pos_rmse_delta{0.0};
};

struct SweepEntry {
  int n_points{0};
  double dt{0.0};
  double first_pos_rmse{0.0};
  double second_pos_rmse{0.0};
  double first_cost{0.0};
  double second_cost{0.0};
};

struct CompareReport {
  std::string config_echo;
  std::array<std::string, 2> pair;
  std::vector<CompareEntry> entries;
  std::vector<SweepEntry> sweep;
};

/// Trajectory CSV with header
///   t,x,y,theta,v,omega,x_ref,y_ref,theta_ref,u_v,u_omega
/// one row per state; the final row repeats the last control. Values carry 17
/// significant digits, so reading the file back reproduces them exactly.
void write_trajectory_csv(const Trajectory& traj, const ReferencePath& ref,
                          const std::filesystem::path& file);

/// Inverse of write_trajectory_csv for the executed sequences. The dv/domega
/// state components are reconstructed from consecutive velocity differences
/// (exact for any trajectory produced by the model); the first state gets
/// zeros there.
[[nodiscard]] Trajectory read_trajectory_csv(const std::filesystem::path& file);

/// Runs the configured controllers from the (possibly perturbed) path start,
/// writes trajectory_<name>.csv per controller plus report.json into out_dir,
/// and returns the report.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         bool emit_gnuplot = false);

/// Runs the configured pair on identical inputs: once as configured, then over
/// a fixed perturbation set (+-0.1 m in x, +-0.1 m in y, +-0.1 rad in
/// heading). Each sweep value rebuilds the bell with that many points over
/// the same physical duration (dt rescaled) and reruns the pair. Writes
/// compare.json, the nominal trajectory CSVs and sweep.csv into out_dir.
/// Requires controller choice "both"; sweeps require a generated path.
CompareReport compare_experiment(const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir,
                                 std::span<const int> sweep_n = {}, bool emit_gnuplot = false);

/// Writes the configured reference path to out_dir/path.csv.
void generate_path_files(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace pathtrack
