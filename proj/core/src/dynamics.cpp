#include "pathtrack/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace pathtrack {

Vector RobotState::to_vector() const {
  Vector out(kDim);
  out << x, y, theta, v, omega, dv, domega;
  return out;
}

RobotState RobotState::from_vector(const Vector& v) {
  if (v.size() != kDim) {
    throw std::invalid_argument("RobotState::from_vector: expected 7 entries");
  }
  return RobotState{v(0), v(1), v(2), v(3), v(4), v(5), v(6)};
}

bool RobotState::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta) &&
         std::isfinite(v) && std::isfinite(omega) && std::isfinite(dv) &&
         std::isfinite(domega);
}

Vector ControlInput::to_vector() const {
  Vector out(kDim);
  out << v_cmd, omega_cmd;
  return out;
}

ControlInput ControlInput::from_vector(const Vector& v) {
  if (v.size() != kDim) {
    throw std::invalid_argument("ControlInput::from_vector: expected 2 entries");
  }
  return ControlInput{v(0), v(1)};
}

bool ControlInput::is_finite() const {
  return std::isfinite(v_cmd) && std::isfinite(omega_cmd);
}

Matrix DynamicsModel::jacobian_x(const Vector& x, const Vector& u) const {
  return fd_jacobians(*this, x, u).first;
}

Matrix DynamicsModel::jacobian_u(const Vector& x, const Vector& u) const {
  return fd_jacobians(*this, x, u).second;
}

std::pair<Matrix, Matrix> fd_jacobians(const DynamicsModel& model,
                                       const Vector& x,
                                       const Vector& u,
                                       double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("fd_jacobians: eps must be positive");
  }
  const Eigen::Index n = model.state_dim();
  const Eigen::Index m = model.control_dim();
  Matrix A(n, n);
  Matrix B(n, m);
  Vector lo, hi;
  for (Eigen::Index j = 0; j < n; ++j) {
    hi = x;
    lo = x;
    hi(j) += eps;
    lo(j) -= eps;
    A.col(j) = (model.step(hi, u) - model.step(lo, u)) / (2.0 * eps);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    hi = u;
    lo = u;
    hi(j) += eps;
    lo(j) -= eps;
    B.col(j) = (model.step(x, hi) - model.step(x, lo)) / (2.0 * eps);
  }
  return {std::move(A), std::move(B)};
}

std::vector<Vector> rollout(const DynamicsModel& model,
                            const Vector& x0,
                            std::span<const Vector> controls) {
  if (controls.empty()) {
    throw std::invalid_argument("rollout: empty control sequence");
  }
  std::vector<Vector> states;
  states.reserve(controls.size() + 1);
  states.push_back(x0);
  for (const Vector& u : controls) {
    states.push_back(model.step(states.back(), u));
  }
  return states;
}

DiffDriveModel::DiffDriveModel(double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("DiffDriveModel: dt must be positive and finite");
  }
}

Vector DiffDriveModel::step(const Vector& x, const Vector& u) const {
  if (x.size() != RobotState::kDim || u.size() != ControlInput::kDim) {
    throw std::invalid_argument("DiffDriveModel::step: bad dimensions");
  }
  if (!x.allFinite() || !u.allFinite()) {
    throw std::invalid_argument("DiffDriveModel::step: non-finite input");
  }
  Vector next(RobotState::kDim);
  next(0) = x(0) + x(3) * std::cos(x(2)) * dt_;
  next(1) = x(1) + x(3) * std::sin(x(2)) * dt_;
  next(2) = x(2) + x(4) * dt_;
  next(3) = u(0);
  next(4) = u(1);
  next(5) = u(0) - x(3);
  next(6) = u(1) - x(4);
  return next;
}

Matrix DiffDriveModel::jacobian_x(const Vector& x, const Vector& u) const {
  if (x.size() != RobotState::kDim || u.size() != ControlInput::kDim) {
    throw std::invalid_argument("DiffDriveModel::jacobian_x: bad dimensions");
  }
  const double st = std::sin(x(2));
  const double ct = std::cos(x(2));
  Matrix A = Matrix::Zero(RobotState::kDim, RobotState::kDim);
  A(0, 0) = 1.0;
  A(0, 2) = -x(3) * st * dt_;
  A(0, 3) = ct * dt_;
  A(1, 1) = 1.0;
  A(1, 2) = x(3) * ct * dt_;
  A(1, 3) = st * dt_;
  A(2, 2) = 1.0;
  A(2, 4) = dt_;
  // velocity rows depend only on the command; the delta rows subtract the
  // stored velocities
  A(5, 3) = -1.0;
  A(6, 4) = -1.0;
  return A;
}

Matrix DiffDriveModel::jacobian_u(const Vector& x, const Vector& u) const {
  if (x.size() != RobotState::kDim || u.size() != ControlInput::kDim) {
    throw std::invalid_argument("DiffDriveModel::jacobian_u: bad dimensions");
  }
  Matrix B = Matrix::Zero(RobotState::kDim, ControlInput::kDim);
  B(3, 0) = 1.0;
  B(4, 1) = 1.0;
  B(5, 0) = 1.0;
  B(6, 1) = 1.0;
  return B;
}

RobotState step(const RobotState& state, const ControlInput& control, double dt) {
  const DiffDriveModel model(dt);
  return RobotState::from_vector(model.step(state.to_vector(), control.to_vector()));
}

Matrix jacobian_x(const RobotState& state, const ControlInput& control, double dt) {
  const DiffDriveModel model(dt);
  return model.jacobian_x(state.to_vector(), control.to_vector());
}

Matrix jacobian_u(const RobotState& state, const ControlInput& control, double dt) {
  const DiffDriveModel model(dt);
  return model.jacobian_u(state.to_vector(), control.to_vector());
}

std::pair<Matrix, Matrix> fd_jacobians(const RobotState& state,
                                       const ControlInput& control,
                                       double dt,
                                       double eps) {
  const DiffDriveModel model(dt);
  return fd_jacobians(model, state.to_vector(), control.to_vector(), eps);
}

std::vector<RobotState> rollout(const RobotState& x0,
                                std::span<const ControlInput> controls,
                                const DiffDriveModel& model) {
  if (controls.empty()) {
    throw std::invalid_argument("rollout: empty control sequence");
  }
  std::vector<RobotState> states;
  states.reserve(controls.size() + 1);
  states.push_back(x0);
  for (const ControlInput& u : controls) {
    states.push_back(RobotState::from_vector(
        model.step(states.back().to_vector(), u.to_vector())));
  }
  return states;
}

}  // namespace pathtrack
