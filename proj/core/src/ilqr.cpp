#include "pathtrack/ilqr.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace pathtrack {

void SolverOptions::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("SolverOptions: max_iterations must be at least 1");
  }
  if (!(convergence_threshold > 0.0)) {
    throw std::invalid_argument("SolverOptions: convergence_threshold must be positive");
  }
  if (!(mu_init >= 0.0) || !(mu_min >= 0.0) || !(mu_max > 0.0) || mu_init > mu_max) {
    throw std::invalid_argument("SolverOptions: regularization range is inconsistent");
  }
  if (!(mu_factor > 1.0)) {
    throw std::invalid_argument("SolverOptions: mu_factor must exceed 1");
  }
  if (alphas.empty() || alphas.front() != 1.0) {
    throw std::invalid_argument("SolverOptions: alphas must start at 1.0");
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || alphas[i] > 1.0) {
      throw std::invalid_argument("SolverOptions: alphas must lie in (0, 1]");
    }
    if (i > 0 && !(alphas[i] < alphas[i - 1])) {
      throw std::invalid_argument("SolverOptions: alphas must strictly decrease");
    }
  }
}

IlqrSolver::IlqrSolver(const DynamicsModel& model, const CostFunction& cost,
                       SolverOptions options)
    : model_(&model), cost_(&cost), options_(std::move(options)) {
  options_.validate();
  if (model.state_dim() != cost.state_dim() || model.control_dim() != cost.control_dim()) {
    throw std::invalid_argument("IlqrSolver: model and cost disagree on dimensions");
  }
}

BackwardPassResult IlqrSolver::backward_pass(std::span<const Vector> X,
                                             std::span<const Vector> U, double mu) const {
  if (X.size() != U.size() + 1 || static_cast<Eigen::Index>(X.size()) != cost_->horizon()) {
    throw std::invalid_argument("backward_pass: sequence lengths do not match the horizon");
  }
  if (!(mu >= 0.0)) {
    throw std::invalid_argument("backward_pass: mu must be non-negative");
  }

  const std::size_t num_steps = U.size();
  const Eigen::Index m = model_->control_dim();

  BackwardPassResult result;
  result.gains.k.resize(num_steps);
  result.gains.K.resize(num_steps);
  result.value.resize(num_steps + 1);

  ValueExpansion& terminal = result.value[num_steps];
  terminal.V_x = cost_->final_gradient(X[num_steps]);
  terminal.V_xx = cost_->final_hessian(X[num_steps]);
  terminal.dV = 0.0;

  const Matrix reg = mu * Matrix::Identity(m, m);

  for (Eigen::Index i = static_cast<Eigen::Index>(num_steps) - 1; i >= 0; --i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const ValueExpansion& next = result.value[si + 1];
    const CostDerivatives l = cost_->derivatives(i, X[si], U[si]);
    const Matrix A = model_->jacobian_x(X[si], U[si]);
    const Matrix B = model_->jacobian_u(X[si], U[si]);

    QExpansion q;
    q.Q_x = l.l_x + A.transpose() * next.V_x;
    q.Q_u = l.l_u + B.transpose() * next.V_x;
    q.Q_xx = l.l_xx + A.transpose() * next.V_xx * A;
    q.Q_uu = l.l_uu + B.transpose() * next.V_xx * B + reg;
    q.Q_ux = l.l_ux + B.transpose() * next.V_xx * A;
    q.Q_uu = (0.5 * (q.Q_uu + q.Q_uu.transpose())).eval();

    const Eigen::LLT<Matrix> llt(q.Q_uu);
    if (llt.info() != Eigen::Success) {
      result.success = false;
      result.failure_index = i;
      return result;
    }

    Vector k = -llt.solve(q.Q_u);
    Matrix K = -llt.solve(q.Q_ux);

    ValueExpansion& cur = result.value[si];
    cur.dV = 0.5 * q.Q_u.dot(k);
    cur.V_x = q.Q_x + q.Q_ux.transpose() * k;
    cur.V_xx = q.Q_xx + q.Q_ux.transpose() * K;
    cur.V_xx = (0.5 * (cur.V_xx + cur.V_xx.transpose())).eval();
    result.dV_total += cur.dV;

    result.gains.k[si] = std::move(k);
    result.gains.K[si] = std::move(K);
  }
  return result;
}

std::pair<std::vector<Vector>, std::vector<Vector>> IlqrSolver::forward_pass(
    std::span<const Vector> X, std::span<const Vector> U, const GainSchedule& gains,
    double alpha) const {
  if (X.size() != U.size() + 1) {
    throw std::invalid_argument("forward_pass: need one more state than controls");
  }
  if (gains.k.size() != U.size() || gains.K.size() != U.size()) {
    throw std::invalid_argument("forward_pass: gain schedule length mismatch");
  }
  if (!(alpha >= 0.0) || alpha > 1.0) {
    throw std::invalid_argument("forward_pass: alpha must lie in [0, 1]");
  }

  std::vector<Vector> new_x;
  std::vector<Vector> new_u;
  new_x.reserve(X.size());
  new_u.reserve(U.size());
  new_x.push_back(X[0]);
  for (std::size_t i = 0; i < U.size(); ++i) {
    Vector u = U[i] + alpha * gains.k[i] + gains.K[i] * (new_x.back() - X[i]);
    new_x.push_back(model_->step(new_x.back(), u));
    new_u.push_back(std::move(u));
  }
  return {std::move(new_x), std::move(new_u)};
}

Solution IlqrSolver::solve(const Vector& x0, std::vector<Vector> u_init) const {
  if (x0.size() != model_->state_dim() || !x0.allFinite()) {
    throw std::invalid_argument("IlqrSolver::solve: bad initial state");
  }
  if (static_cast<Eigen::Index>(u_init.size()) + 1 != cost_->horizon()) {
    throw std::invalid_argument("IlqrSolver::solve: control sequence does not match the horizon");
  }
  for (const Vector& u : u_init) {
    if (u.size() != model_->control_dim()) {
      throw std::invalid_argument("IlqrSolver::solve: control with wrong dimension");
    }
  }

  Solution sol;
  std::vector<Vector> X = rollout(*model_, x0, u_init);
  std::vector<Vector> U = std::move(u_init);
  double cost = cost_->total(X, U);
  sol.cost_history.push_back(cost);

  double mu = options_.mu_init;
  bool converged = false;
  int iter = 0;

  while (iter < options_.max_iterations && !converged) {
    ++iter;

    // backward sweep, escalating regularization until the control Hessians
    // factor
    BackwardPassResult bp = backward_pass(X, U, mu);
    while (!bp.success) {
      mu *= options_.mu_factor;
      if (mu > options_.mu_max) {
        sol.X = std::move(X);
        sol.U = std::move(U);
        sol.iterations = iter;
        sol.converged = false;
        return sol;
      }
      bp = backward_pass(X, U, mu);
    }
    sol.gains = bp.gains;

    bool accepted = false;
    double smallest_change = std::numeric_limits<double>::infinity();
    for (double alpha : options_.alphas) {
      auto [cand_x, cand_u] = forward_pass(X, U, bp.gains, alpha);
      const double cand_cost = cost_->total(cand_x, cand_u);
      const double change = std::abs(cost - cand_cost);
      smallest_change = std::min(smallest_change, change);
      const bool improves = cand_cost < cost;
      sol.trace.push_back(IterationRecord{iter, cost, cand_cost, alpha, mu, improves});
      if (improves) {
        X = std::move(cand_x);
        U = std::move(cand_u);
        cost = cand_cost;
        sol.cost_history.push_back(cost);
        mu = std::max(mu / options_.mu_factor, options_.mu_min);
        accepted = true;
        if (change < options_.convergence_threshold) {
          converged = true;
        }
        break;
      }
    }

    if (!accepted) {
      if (smallest_change < options_.convergence_threshold) {
        // no step improves, but the best candidate matches the current cost
        // to within the threshold: the trajectory is as good as the local
        // model can make it
        converged = true;
      } else {
        mu *= options_.mu_factor;
        if (mu > options_.mu_max) {
          break;
        }
      }
    }
  }

  sol.X = std::move(X);
  sol.U = std::move(U);
  sol.iterations = iter;
  sol.converged = converged;
  return sol;
}

}  // namespace pathtrack
