#pragma once

#include <span>
#include <vector>

#include "pathtrack/dynamics.hpp"
#include "pathtrack/path.hpp"
#include "pathtrack/types.hpp"

namespace pathtrack {

/// Quadratic stage weights. Construction verifies that Q and Qf are symmetric
/// positive semi-definite and R is symmetric positive definite; anything else
/// throws std::invalid_argument.
struct CostWeights {
  Matrix Q;
  Matrix R;
  Matrix Qf;

  CostWeights(Matrix q, Matrix r, Matrix qf);

  [[nodiscard]] static CostWeights diagonal(const Vector& q_diag, const Vector& r_diag,
                                            const Vector& qf_diag);

  /// Tracking weights for the 7-state robot: Q = diag(10, 10, 1, 0.1, 0.1, 0, 0),
  /// R = diag(1, 1), Qf = 10 Q.
  [[nodiscard]] static CostWeights robot_defaults();
};

/// First and second derivatives of a stage cost at one (x, u) pair.
struct CostDerivatives {
  Vector l_x;
  Vector l_u;
  Matrix l_xx;
  Matrix l_uu;
  Matrix l_ux;
};

/// How the control term is charged: against the deviation from the reference
/// control (tracking) or against the raw control (regulation).
enum class ControlPenalty { kDeviation, kAbsolute };

/// x - x_ref with the listed components treated as angles: their differences
/// are wrapped into [-pi, pi).
[[nodiscard]] Vector state_error(const Vector& x, const Vector& x_ref,
                                 std::span<const Eigen::Index> angle_indices);

/// 7-state robot error with the heading wrapped.
[[nodiscard]] Vector robot_state_error(const RobotState& x, const RobotState& x_ref);

/// Additive horizon cost: running terms over stages 0..N-2 plus a final term.
/// horizon() is the number of states N; stage index k addresses stage costs
/// for k in [0, N-2].
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  [[nodiscard]] virtual Eigen::Index horizon() const = 0;
  [[nodiscard]] virtual int state_dim() const = 0;
  [[nodiscard]] virtual int control_dim() const = 0;

  [[nodiscard]] virtual double running(Eigen::Index k, const Vector& x, const Vector& u) const = 0;
  [[nodiscard]] virtual double final(const Vector& x) const = 0;
  [[nodiscard]] virtual CostDerivatives derivatives(Eigen::Index k, const Vector& x,
                                                    const Vector& u) const = 0;
  [[nodiscard]] virtual Vector final_gradient(const Vector& x) const = 0;
  [[nodiscard]] virtual Matrix final_hessian(const Vector& x) const = 0;

  /// Sum of all running terms plus the final term. Requires len(X) = len(U) + 1
  /// = horizon(); otherwise throws std::invalid_argument.
  [[nodiscard]] double total(std::span<const Vector> X, std::span<const Vector> U) const;

  /// Tail sum from stage t onward. t outside [0, horizon() - 1] throws
  /// std::invalid_argument; t = horizon() - 1 gives the final term alone.
  [[nodiscard]] double cost_to_go(std::span<const Vector> X, std::span<const Vector> U,
                                  Eigen::Index t) const;
};

/// Quadratic tracking cost against fixed reference sequences:
///   l_k = 1/2 e_x' Q e_x + 1/2 e_u' R e_u,   l_N = 1/2 e_N' Qf e_N
/// with e_x = x - x_ref[k] (angle components wrapped) and e_u either
/// u - u_ref[k] or u, depending on the control penalty mode.
class TrackingCost final : public CostFunction {
 public:
  TrackingCost(CostWeights weights, std::vector<Vector> x_ref, std::vector<Vector> u_ref,
               std::vector<Eigen::Index> angle_indices = {},
               ControlPenalty penalty = ControlPenalty::kDeviation);

  /// Tracks a reference path with its feedforward controls as u_ref; the
  /// heading component is wrapped.
  [[nodiscard]] static TrackingCost for_path(const ReferencePath& ref, CostWeights weights,
                                             ControlPenalty penalty = ControlPenalty::kDeviation);

  [[nodiscard]] Eigen::Index horizon() const override;
  [[nodiscard]] int state_dim() const override;
  [[nodiscard]] int control_dim() const override;

  [[nodiscard]] double running(Eigen::Index k, const Vector& x, const Vector& u) const override;
  [[nodiscard]] double final(const Vector& x) const override;
  [[nodiscard]] CostDerivatives derivatives(Eigen::Index k, const Vector& x,
                                            const Vector& u) const override;
  [[nodiscard]] Vector final_gradient(const Vector& x) const override;
  [[nodiscard]] Matrix final_hessian(const Vector& x) const override;

  [[nodiscard]] const CostWeights& weights() const { return weights_; }

 private:
  [[nodiscard]] Vector control_error(Eigen::Index k, const Vector& u) const;

  CostWeights weights_;
  std::vector<Vector> x_ref_;
  std::vector<Vector> u_ref_;
  std::vector<Eigen::Index> angle_indices_;
  ControlPenalty penalty_;
};

// Typed forms on the robot state, all in deviation form against the
// reference's feedforward controls.
[[nodiscard]] double running_cost(const RobotState& x, const ControlInput& u,
                                  const RobotState& x_ref, const ControlInput& u_ref,
                                  const CostWeights& weights);
[[nodiscard]] double final_cost(const RobotState& x, const RobotState& x_ref,
                                const CostWeights& weights);
[[nodiscard]] CostDerivatives cost_derivatives(const RobotState& x, const ControlInput& u,
                                               const RobotState& x_ref, const ControlInput& u_ref,
                                               const CostWeights& weights);
[[nodiscard]] double total_cost(std::span<const RobotState> X, std::span<const ControlInput> U,
                                const ReferencePath& ref, const CostWeights& weights);
[[nodiscard]] double cost_to_go(std::span<const RobotState> X, std::span<const ControlInput> U,
                                const ReferencePath& ref, const CostWeights& weights,
                                Eigen::Index t);

/// Evaluates a trajectory against a reference, filling traj.step_costs with
/// the N-1 running terms followed by the final term and returning their sum.
double score(Trajectory& traj, const ReferencePath& ref, const CostWeights& weights);

}  // namespace pathtrack
