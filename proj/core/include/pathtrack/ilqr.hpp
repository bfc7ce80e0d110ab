#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pathtrack/cost.hpp"
#include "pathtrack/dynamics.hpp"
#include "pathtrack/types.hpp"

namespace pathtrack {

/// Quadratic expansion of the stage action-value function around one
/// (x_i, u_i) pair.
struct QExpansion {
  Vector Q_x;
  Vector Q_u;
  Matrix Q_xx;
  Matrix Q_uu;
  Matrix Q_ux;
};

/// Quadratic model of the cost-to-go at one state, plus the predicted cost
/// change dV contributed by the feedforward step at that stage.
struct ValueExpansion {
  Vector V_x;
  Matrix V_xx;
  double dV{0.0};
};

/// Feedforward and feedback gains for every stage: u_i' = u_i + alpha k[i] +
/// K[i] (x_i' - x_i). Both sequences have one entry per control.
struct GainSchedule {
  std::vector<Vector> k;
  std::vector<Matrix> K;

  [[nodiscard]] std::size_t size() const { return k.size(); }
};

struct SolverOptions {
  int max_iterations{100};
  /// Accepted-cost change below which the solve counts as converged.
  double convergence_threshold{1e-6};
  double mu_init{1e-6};
  double mu_min{1e-8};
  double mu_max{1e10};
  double mu_factor{10.0};
  /// Line-search scaling of the feedforward term, tried in order. Must start
  /// at 1.0 and strictly decrease within (0, 1].
  std::vector<double> alphas{1.0, 0.5, 0.25, 0.1, 0.05, 0.01};

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

/// One line-search attempt: the cost before the iteration, the candidate cost
/// at this alpha, and whether the candidate was accepted.
struct IterationRecord {
  int iteration{0};
  double cost_before{0.0};
  double cost_after{0.0};
  double alpha{0.0};
  double mu{0.0};
  bool accepted{false};
};

struct Solution {
  std::vector<Vector> X;
  std::vector<Vector> U;
  GainSchedule gains;
  /// Initial cost followed by every accepted cost, so never increasing.
  std::vector<double> cost_history;
  std::vector<IterationRecord> trace;
  int iterations{0};
  bool converged{false};

  [[nodiscard]] double final_cost() const { return cost_history.back(); }
};

/// Result of one backward sweep. When a regularized control Hessian loses
/// positive definiteness the sweep stops: success turns false and
/// failure_index names the offending stage, with no exception thrown.
struct BackwardPassResult {
  GainSchedule gains;
  /// value[i] models the cost-to-go at state i; value[N-1] is the final-cost
  /// expansion.
  std::vector<ValueExpansion> value;
  double dV_total{0.0};
  bool success{true};
  Eigen::Index failure_index{-1};
};

/// Iterative LQR over a dynamics model and an additive horizon cost. The pair
/// must agree on dimensions and horizon. Dynamics enter the backward pass
/// through their Jacobians only; second-order dynamics terms are dropped.
class IlqrSolver {
 public:
  IlqrSolver(const DynamicsModel& model, const CostFunction& cost, SolverOptions options = {});

  /// Rolls out u_init from x0 and improves it until the accepted cost change
  /// falls below the threshold. Hitting max_iterations or exhausting the
  /// regularization range returns the best trajectory found so far with
  /// converged = false.
  [[nodiscard]] Solution solve(const Vector& x0, std::vector<Vector> u_init) const;

  /// One backward sweep along (X, U) with regularization mu added to each
  /// control Hessian.
  [[nodiscard]] BackwardPassResult backward_pass(std::span<const Vector> X,
                                                 std::span<const Vector> U, double mu) const;

  /// Re-rolls the trajectory with u_i' = U[i] + alpha k[i] + K[i] (x_i' -
  /// X[i]); alpha scales only the feedforward term. With zero gains and any
  /// alpha this reproduces (X, U) exactly.
  [[nodiscard]] std::pair<std::vector<Vector>, std::vector<Vector>> forward_pass(
      std::span<const Vector> X, std::span<const Vector> U, const GainSchedule& gains,
      double alpha) const;

  [[nodiscard]] const SolverOptions& options() const { return options_; }

 private:
  const DynamicsModel* model_;
  const CostFunction* cost_;
  SolverOptions options_;
};

}  // namespace pathtrack
