#include "pathtrack/lqr.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pathtrack {
namespace {

RobotState interpolate_reference(const RobotState& a, const RobotState& b, double frac) {
  RobotState out;
  out.x = a.x + frac * (b.x - a.x);
  out.y = a.y + frac * (b.y - a.y);
  out.theta = a.theta + frac * wrap_angle(b.theta - a.theta);
  out.v = a.v + frac * (b.v - a.v);
  out.omega = a.omega + frac * (b.omega - a.omega);
  out.dv = a.dv + frac * (b.dv - a.dv);
  out.domega = a.domega + frac * (b.domega - a.domega);
  return out;
}

}  // namespace

std::vector<OperatingPoint> linearize_along(std::span<const Vector> ref_states,
                                            std::span<const Vector> ref_controls,
                                            const DynamicsModel& model) {
  if (ref_states.size() != ref_controls.size() + 1) {
    throw std::invalid_argument("linearize_along: need one more state than controls");
  }
  std::vector<OperatingPoint> ops;
  ops.reserve(ref_controls.size());
  for (std::size_t i = 0; i < ref_controls.size(); ++i) {
    OperatingPoint op;
    op.index = static_cast<Eigen::Index>(i);
    op.x_op = ref_states[i];
    op.u_op = ref_controls[i];
    op.A = model.jacobian_x(ref_states[i], ref_controls[i]);
    op.B = model.jacobian_u(ref_states[i], ref_controls[i]);
    ops.push_back(std::move(op));
  }
  return ops;
}

RiccatiResult riccati_recursion(std::span<const OperatingPoint> ops, const CostWeights& weights) {
  if (ops.empty()) {
    throw std::invalid_argument("riccati_recursion: no operating points");
  }
  const Eigen::Index n = weights.Q.rows();
  const Eigen::Index m = weights.R.rows();
  for (const OperatingPoint& op : ops) {
    if (op.A.rows() != n || op.A.cols() != n || op.B.rows() != n || op.B.cols() != m) {
      throw std::invalid_argument("riccati_recursion: linearization size does not match weights");
    }
    if (!op.A.allFinite() || !op.B.allFinite()) {
      throw std::invalid_argument("riccati_recursion: non-finite linearization");
    }
  }

  const std::size_t num_steps = ops.size();
  RiccatiResult result;
  result.gains.resize(num_steps);
  result.cost_to_go.resize(num_steps + 1);

  Matrix P = weights.Qf;
  result.cost_to_go[num_steps] = P;
  for (Eigen::Index i = static_cast<Eigen::Index>(num_steps) - 1; i >= 0; --i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const Matrix& A = ops[si].A;
    const Matrix& B = ops[si].B;
    Matrix S = weights.R + B.transpose() * P * B;
    S = (0.5 * (S + S.transpose())).eval();
    const Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("riccati_recursion: control cost matrix lost positive definiteness");
    }
    Matrix K = llt.solve(B.transpose() * P * A);
    P = weights.Q + A.transpose() * P * (A - B * K);
    P = (0.5 * (P + P.transpose())).eval();
    result.gains[si] = std::move(K);
    result.cost_to_go[si] = P;
  }
  return result;
}

std::vector<Matrix> tv_lqr_gains(std::span<const OperatingPoint> ops, const CostWeights& weights) {
  return riccati_recursion(ops, weights).gains;
}

Trajectory track(const RobotState& x0, const ReferencePath& ref,
                 std::span<const ControlInput> u_ff, std::span<const Matrix> gains,
                 const DiffDriveModel& model, int substeps) {
  const std::size_t num_steps = ref.size() - 1;
  if (u_ff.size() != num_steps || gains.size() != num_steps) {
    throw std::invalid_argument("track: feedforward and gain lengths must match the reference");
  }
  if (substeps < 1) {
    throw std::invalid_argument("track: substeps must be at least 1");
  }
  for (const Matrix& K : gains) {
    if (K.rows() != ControlInput::kDim || K.cols() != RobotState::kDim) {
      throw std::invalid_argument("track: gain matrix with wrong dimensions");
    }
  }
  if (!x0.is_finite()) {
    throw std::invalid_argument("track: non-finite initial state");
  }

  const DiffDriveModel plant(model.dt() / substeps);
  Trajectory traj;
  traj.states.reserve(ref.size());
  traj.controls.reserve(num_steps);
  traj.states.push_back(x0);

  RobotState x = x0;
  for (std::size_t i = 0; i < num_steps; ++i) {
    for (int j = 0; j < substeps; ++j) {
      const double frac = static_cast<double>(j) / static_cast<double>(substeps);
      const RobotState target =
          (j == 0) ? ref.states()[i]
                   : interpolate_reference(ref.states()[i], ref.states()[i + 1], frac);
      const Vector dx = robot_state_error(x, target);
      const Vector du = gains[i] * dx;
      const ControlInput u{u_ff[i].v_cmd - du(0), u_ff[i].omega_cmd - du(1)};
      if (j == 0) {
        traj.controls.push_back(u);
      }
      x = RobotState::from_vector(plant.step(x.to_vector(), u.to_vector()));
    }
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace pathtrack
