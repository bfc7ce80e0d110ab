#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pathtrack/types.hpp"

namespace pathtrack {

/// Augmented state of the differential-drive robot: planar pose, the velocity
/// pair currently in effect, and the velocity change over the last step.
///
/// The heading accumulates without wrapping. Wrapping into [-pi, pi) happens
/// wherever errors are formed (costs, tracking metrics), never in the state.
struct RobotState {
  double x{0.0};       ///< position [m]
  double y{0.0};       ///< position [m]
  double theta{0.0};   ///< heading [rad], unwrapped
  double v{0.0};       ///< linear velocity [m/s]
  double omega{0.0};   ///< angular velocity [rad/s]
  double dv{0.0};      ///< linear velocity change over the last step [m/s]
  double domega{0.0};  ///< angular velocity change over the last step [rad/s]

  static constexpr int kDim = 7;

  [[nodiscard]] Vector to_vector() const;
  [[nodiscard]] static RobotState from_vector(const Vector& v);
  [[nodiscard]] bool is_finite() const;
};

/// Velocity command pair applied for one step.
struct ControlInput {
  double v_cmd{0.0};      ///< commanded linear velocity [m/s]
  double omega_cmd{0.0};  ///< commanded angular velocity [rad/s]

  static constexpr int kDim = 2;

  [[nodiscard]] Vector to_vector() const;
  [[nodiscard]] static ControlInput from_vector(const Vector& v);
  [[nodiscard]] bool is_finite() const;
};

/// Executed state/control sequences. states has one more entry than controls.
/// step_costs is filled by score() in cost.hpp and stays empty until then.
struct Trajectory {
  std::vector<RobotState> states;
  std::vector<ControlInput> controls;
  std::vector<double> step_costs;
};

/// Discrete-time dynamics x_{k+1} = f(x_k, u_k) with fixed dimensions and a
/// fixed step length. Models with analytic derivatives override jacobian_x /
/// jacobian_u; the defaults fall back to central finite differences.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  [[nodiscard]] virtual int state_dim() const = 0;
  [[nodiscard]] virtual int control_dim() const = 0;
  [[nodiscard]] virtual double dt() const = 0;

  [[nodiscard]] virtual Vector step(const Vector& x, const Vector& u) const = 0;
  [[nodiscard]] virtual Matrix jacobian_x(const Vector& x, const Vector& u) const;
  [[nodiscard]] virtual Matrix jacobian_u(const Vector& x, const Vector& u) const;
};

/// Central-difference Jacobians (df/dx, df/du) of model.step at (x, u).
/// Throws std::invalid_argument when eps <= 0.
[[nodiscard]] std::pair<Matrix, Matrix> fd_jacobians(const DynamicsModel& model,
                                                     const Vector& x,
                                                     const Vector& u,
                                                     double eps = 1e-6);

/// Applies the control sequence from x0; returns all visited states, so the
/// result has controls.size() + 1 entries. An empty control sequence throws
/// std::invalid_argument.
[[nodiscard]] std::vector<Vector> rollout(const DynamicsModel& model,
                                          const Vector& x0,
                                          std::span<const Vector> controls);

/// Differential-drive kinematics on the augmented 7-state. One step advances
/// the pose with the velocities *stored in the state* and then latches the
/// commanded pair, so a command moves the pose one step later:
///
///   x'     = x + v cos(theta) dt        v'  = v_cmd
///   y'     = y + v sin(theta) dt        w'  = w_cmd
///   theta' = theta + w dt               dv' = v_cmd - v,  dw' = w_cmd - w
class DiffDriveModel final : public DynamicsModel {
 public:
  explicit DiffDriveModel(double dt = 0.1);

  [[nodiscard]] int state_dim() const override { return RobotState::kDim; }
  [[nodiscard]] int control_dim() const override { return ControlInput::kDim; }
  [[nodiscard]] double dt() const override { return dt_; }

  [[nodiscard]] Vector step(const Vector& x, const Vector& u) const override;
  [[nodiscard]] Matrix jacobian_x(const Vector& x, const Vector& u) const override;
  [[nodiscard]] Matrix jacobian_u(const Vector& x, const Vector& u) const override;

 private:
  double dt_;
};

// Typed convenience forms of the same operations.
[[nodiscard]] RobotState step(const RobotState& state, const ControlInput& control, double dt);
[[nodiscard]] Matrix jacobian_x(const RobotState& state, const ControlInput& control, double dt);
[[nodiscard]] Matrix jacobian_u(const RobotState& state, const ControlInput& control, double dt);
[[nodiscard]] std::pair<Matrix, Matrix> fd_jacobians(const RobotState& state,
                                                     const ControlInput& control,
                                                     double dt,
                                                     double eps = 1e-6);
[[nodiscard]] std::vector<RobotState> rollout(const RobotState& x0,
                                              std::span<const ControlInput> controls,
                                              const DiffDriveModel& model);

}  // namespace pathtrack
