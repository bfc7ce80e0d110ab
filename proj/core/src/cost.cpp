#include "pathtrack/cost.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pathtrack {
namespace {

constexpr Eigen::Index kHeadingIndex = 2;

void check_square_symmetric(const Matrix& m, const char* name) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string("CostWeights: ") + name + " must be square");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string("CostWeights: ") + name + " must be symmetric");
  }
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double quad(const Matrix& w, const Vector& e) { return 0.5 * e.dot(w * e); }

}  // namespace

CostWeights::CostWeights(Matrix q, Matrix r, Matrix qf)
    : Q(std::move(q)), R(std::move(r)), Qf(std::move(qf)) {
  check_square_symmetric(Q, "Q");
  check_square_symmetric(R, "R");
  check_square_symmetric(Qf, "Qf");
  if (Qf.rows() != Q.rows()) {
    throw std::invalid_argument("CostWeights: Q and Qf must have the same size");
  }
  const double tol = 1e-10;
  if (min_eigenvalue(Q) < -tol * (1.0 + Q.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("CostWeights: Q must be positive semi-definite");
  }
  if (min_eigenvalue(Qf) < -tol * (1.0 + Qf.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("CostWeights: Qf must be positive semi-definite");
  }
  if (!(min_eigenvalue(R) > 0.0)) {
    throw std::invalid_argument("CostWeights: R must be positive definite");
  }
}

CostWeights CostWeights::diagonal(const Vector& q_diag, const Vector& r_diag,
                                  const Vector& qf_diag) {
  if (q_diag.size() == 0 || r_diag.size() == 0 || qf_diag.size() != q_diag.size()) {
    throw std::invalid_argument("CostWeights::diagonal: bad diagonal lengths");
  }
  return CostWeights(q_diag.asDiagonal(), r_diag.asDiagonal(), qf_diag.asDiagonal());
}

CostWeights CostWeights::robot_defaults() {
  Vector q(RobotState::kDim);
  q << 10.0, 10.0, 1.0, 0.1, 0.1, 0.0, 0.0;
  Vector r(ControlInput::kDim);
  r << 1.0, 1.0;
  return diagonal(q, r, 10.0 * q);
}

Vector state_error(const Vector& x, const Vector& x_ref,
                   std::span<const Eigen::Index> angle_indices) {
  if (x.size() != x_ref.size()) {
    throw std::invalid_argument("state_error: dimension mismatch");
  }
  Vector e = x - x_ref;
  for (Eigen::Index idx : angle_indices) {
    if (idx < 0 || idx >= e.size()) {
      throw std::invalid_argument("state_error: angle index out of range");
    }
    e(idx) = wrap_angle(e(idx));
  }
  return e;
}

Vector robot_state_error(const RobotState& x, const RobotState& x_ref) {
  Vector e = x.to_vector() - x_ref.to_vector();
  e(kHeadingIndex) = wrap_angle(e(kHeadingIndex));
  return e;
}

double CostFunction::total(std::span<const Vector> X, std::span<const Vector> U) const {
  if (X.size() != U.size() + 1 || static_cast<Eigen::Index>(X.size()) != horizon()) {
    throw std::invalid_argument("CostFunction::total: sequence lengths do not match the horizon");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < U.size(); ++k) {
    sum += running(static_cast<Eigen::Index>(k), X[k], U[k]);
  }
  return sum + final(X.back());
}

double CostFunction::cost_to_go(std::span<const Vector> X, std::span<const Vector> U,
                                Eigen::Index t) const {
  if (X.size() != U.size() + 1 || static_cast<Eigen::Index>(X.size()) != horizon()) {
    throw std::invalid_argument(
        "CostFunction::cost_to_go: sequence lengths do not match the horizon");
  }
  if (t < 0 || t >= horizon()) {
    throw std::invalid_argument("CostFunction::cost_to_go: stage index out of range");
  }
  double sum = 0.0;
  for (std::size_t k = static_cast<std::size_t>(t); k < U.size(); ++k) {
    sum += running(static_cast<Eigen::Index>(k), X[k], U[k]);
  }
  return sum + final(X.back());
}

TrackingCost::TrackingCost(CostWeights weights, std::vector<Vector> x_ref,
                           std::vector<Vector> u_ref, std::vector<Eigen::Index> angle_indices,
                           ControlPenalty penalty)
    : weights_(std::move(weights)),
      x_ref_(std::move(x_ref)),
      u_ref_(std::move(u_ref)),
      angle_indices_(std::move(angle_indices)),
      penalty_(penalty) {
  if (x_ref_.empty() || u_ref_.size() + 1 != x_ref_.size()) {
    throw std::invalid_argument("TrackingCost: need n reference states and n-1 controls");
  }
  for (const Vector& x : x_ref_) {
    if (x.size() != weights_.Q.rows()) {
      throw std::invalid_argument("TrackingCost: reference state size does not match Q");
    }
  }
  for (const Vector& u : u_ref_) {
    if (u.size() != weights_.R.rows()) {
      throw std::invalid_argument("TrackingCost: reference control size does not match R");
    }
  }
  for (Eigen::Index idx : angle_indices_) {
    if (idx < 0 || idx >= weights_.Q.rows()) {
      throw std::invalid_argument("TrackingCost: angle index out of range");
    }
  }
}

TrackingCost TrackingCost::for_path(const ReferencePath& ref, CostWeights weights,
                                    ControlPenalty penalty) {
  if (weights.Q.rows() != RobotState::kDim || weights.R.rows() != ControlInput::kDim) {
    throw std::invalid_argument("TrackingCost::for_path: weights sized for a different model");
  }
  return TrackingCost(std::move(weights), ref.state_vectors(), ref.control_vectors(),
                      {kHeadingIndex}, penalty);
}

Eigen::Index TrackingCost::horizon() const { return static_cast<Eigen::Index>(x_ref_.size()); }

int TrackingCost::state_dim() const { return static_cast<int>(weights_.Q.rows()); }

int TrackingCost::control_dim() const { return static_cast<int>(weights_.R.rows()); }

Vector TrackingCost::control_error(Eigen::Index k, const Vector& u) const {
  if (u.size() != weights_.R.rows()) {
    throw std::invalid_argument("TrackingCost: control dimension mismatch");
  }
  if (penalty_ == ControlPenalty::kDeviation) {
    return u - u_ref_[static_cast<std::size_t>(k)];
  }
  return u;
}

double TrackingCost::running(Eigen::Index k, const Vector& x, const Vector& u) const {
  if (k < 0 || k >= horizon() - 1) {
    throw std::invalid_argument("TrackingCost::running: stage index out of range");
  }
  const Vector e_x = state_error(x, x_ref_[static_cast<std::size_t>(k)], angle_indices_);
  const Vector e_u = control_error(k, u);
  return quad(weights_.Q, e_x) + quad(weights_.R, e_u);
}

double TrackingCost::final(const Vector& x) const {
  return quad(weights_.Qf, state_error(x, x_ref_.back(), angle_indices_));
}

CostDerivatives TrackingCost::derivatives(Eigen::Index k, const Vector& x, const Vector& u) const {
  if (k < 0 || k >= horizon() - 1) {
    throw std::invalid_argument("TrackingCost::derivatives: stage index out of range");
  }
  const Vector e_x = state_error(x, x_ref_[static_cast<std::size_t>(k)], angle_indices_);
  const Vector e_u = control_error(k, u);
  CostDerivatives d;
  d.l_x = weights_.Q * e_x;
  d.l_u = weights_.R * e_u;
  d.l_xx = weights_.Q;
  d.l_uu = weights_.R;
  d.l_ux = Matrix::Zero(weights_.R.rows(), weights_.Q.rows());
  return d;
}

Vector TrackingCost::final_gradient(const Vector& x) const {
  return weights_.Qf * state_error(x, x_ref_.back(), angle_indices_);
}

Matrix TrackingCost::final_hessian(const Vector& x) const {
  if (x.size() != weights_.Qf.rows()) {
    throw std::invalid_argument("TrackingCost::final_hessian: dimension mismatch");
  }
  return weights_.Qf;
}

double running_cost(const RobotState& x, const ControlInput& u, const RobotState& x_ref,
                    const ControlInput& u_ref, const CostWeights& weights) {
  if (weights.Q.rows() != RobotState::kDim || weights.R.rows() != ControlInput::kDim) {
    throw std::invalid_argument("running_cost: weights sized for a different model");
  }
  return quad(weights.Q, robot_state_error(x, x_ref)) +
         quad(weights.R, u.to_vector() - u_ref.to_vector());
}

double final_cost(const RobotState& x, const RobotState& x_ref, const CostWeights& weights) {
  if (weights.Qf.rows() != RobotState::kDim) {
    throw std::invalid_argument("final_cost: weights sized for a different model");
  }
  return quad(weights.Qf, robot_state_error(x, x_ref));
}

CostDerivatives cost_derivatives(const RobotState& x, const ControlInput& u,
                                 const RobotState& x_ref, const ControlInput& u_ref,
                                 const CostWeights& weights) {
  if (weights.Q.rows() != RobotState::kDim || weights.R.rows() != ControlInput::kDim) {
    throw std::invalid_argument("cost_derivatives: weights sized for a different model");
  }
  CostDerivatives d;
  d.l_x = weights.Q * robot_state_error(x, x_ref);
  d.l_u = weights.R * (u.to_vector() - u_ref.to_vector());
  d.l_xx = weights.Q;
  d.l_uu = weights.R;
  d.l_ux = Matrix::Zero(ControlInput::kDim, RobotState::kDim);
  return d;
}

double total_cost(std::span<const RobotState> X, std::span<const ControlInput> U,
                  const ReferencePath& ref, const CostWeights& weights) {
  if (X.size() != U.size() + 1 || X.size() != ref.size()) {
    throw std::invalid_argument("total_cost: sequence lengths do not match the reference");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < U.size(); ++k) {
    sum += running_cost(X[k], U[k], ref.states()[k], ref.controls()[k], weights);
  }
  return sum + final_cost(X.back(), ref.states().back(), weights);
}

double cost_to_go(std::span<const RobotState> X, std::span<const ControlInput> U,
                  const ReferencePath& ref, const CostWeights& weights, Eigen::Index t) {
  if (X.size() != U.size() + 1 || X.size() != ref.size()) {
    throw std::invalid_argument("cost_to_go: sequence lengths do not match the reference");
  }
  if (t < 0 || static_cast<std::size_t>(t) >= X.size()) {
    throw std::invalid_argument("cost_to_go: stage index out of range");
  }
  double sum = 0.0;
  for (std::size_t k = static_cast<std::size_t>(t); k < U.size(); ++k) {
    sum += running_cost(X[k], U[k], ref.states()[k], ref.controls()[k], weights);
  }
  return sum + final_cost(X.back(), ref.states().back(), weights);
}

double score(Trajectory& traj, const ReferencePath& ref, const CostWeights& weights) {
  if (traj.states.size() != traj.controls.size() + 1 || traj.states.size() != ref.size()) {
    throw std::invalid_argument("score: trajectory does not match the reference length");
  }
  traj.step_costs.clear();
  traj.step_costs.reserve(traj.states.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.controls.size(); ++k) {
    const double c =
        running_cost(traj.states[k], traj.controls[k], ref.states()[k], ref.controls()[k], weights);
    traj.step_costs.push_back(c);
    sum += c;
  }
  const double cf = final_cost(traj.states.back(), ref.states().back(), weights);
  traj.step_costs.push_back(cf);
  return sum + cf;
}

}  // namespace pathtrack
