#pragma once

#include <span>
#include <vector>

#include "pathtrack/cost.hpp"
#include "pathtrack/dynamics.hpp"
#include "pathtrack/path.hpp"
#include "pathtrack/types.hpp"

namespace pathtrack {

/// Linearization of the dynamics at one reference pair: A = df/dx, B = df/du
/// evaluated at (x_op, u_op).
struct OperatingPoint {
  Eigen::Index index{0};
  Vector x_op;
  Vector u_op;
  Matrix A;
  Matrix B;
};

/// One operating point per reference control. Requires len(ref_states) =
/// len(ref_controls) + 1.
[[nodiscard]] std::vector<OperatingPoint> linearize_along(std::span<const Vector> ref_states,
                                                          std::span<const Vector> ref_controls,
                                                          const DynamicsModel& model);

/// Finite-horizon discrete Riccati sweep along a sequence of linearizations.
/// gains[i] is the feedback matrix at stage i; cost_to_go[i] is the quadratic
/// cost-to-go matrix P_i, with cost_to_go.back() = Qf. A control-cost matrix
/// that loses positive definiteness throws std::runtime_error.
struct RiccatiResult {
  std::vector<Matrix> gains;
  std::vector<Matrix> cost_to_go;
};

[[nodiscard]] RiccatiResult riccati_recursion(std::span<const OperatingPoint> ops,
                                              const CostWeights& weights);

/// Just the feedback matrices from riccati_recursion.
[[nodiscard]] std::vector<Matrix> tv_lqr_gains(std::span<const OperatingPoint> ops,
                                               const CostWeights& weights);

/// Closed-loop tracking rollout: at each stage u = u_ff[i] - K[i] dx with dx
/// the heading-wrapped deviation from the reference state. substeps > 1 runs
/// the plant at dt / substeps between reference points, re-evaluating the
/// feedback against an interpolated reference; the recorded control is the
/// one applied at the start of each segment.
[[nodiscard]] Trajectory track(const RobotState& x0, const ReferencePath& ref,
                               std::span<const ControlInput> u_ff,
                               std::span<const Matrix> gains, const DiffDriveModel& model,
                               int substeps = 1);

}  // namespace pathtrack
