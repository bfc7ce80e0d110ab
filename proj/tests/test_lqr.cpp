#include "pathtrack/lqr.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "pathtrack/ilqr.hpp"
#include "support/test_models.hpp"

namespace pathtrack {
namespace {

std::vector<OperatingPoint> bell_operating_points(const ReferencePath& path,
                                                  const DiffDriveModel& model) {
  return linearize_along(path.state_vectors(), path.control_vectors(), model);
}

TEST(RiccatiRecursion, ScalarHandCase) {
  // A = B = Q = R = Qf = 1, one step: K = (1 + 1)^-1 * 1 = 0.5 and
  // P0 = 1 + 1 * (1 - 0.5) = 1.5
  OperatingPoint op;
  op.index = 0;
  op.x_op = Vector::Zero(1);
  op.u_op = Vector::Zero(1);
  op.A = Matrix::Ones(1, 1);
  op.B = Matrix::Ones(1, 1);
  const CostWeights w(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  const RiccatiResult result = riccati_recursion(std::vector<OperatingPoint>{op}, w);
  ASSERT_EQ(result.gains.size(), 1u);
  ASSERT_EQ(result.cost_to_go.size(), 2u);
  EXPECT_DOUBLE_EQ(result.gains[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(result.cost_to_go[0](0, 0), 1.5);
  EXPECT_DOUBLE_EQ(result.cost_to_go[1](0, 0), 1.0);
}

TEST(LinearizeAlong, StraightLineHasConstantJacobians) {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> headings;
  for (int i = 0; i < 15; ++i) {
    points.emplace_back(0.1 * i, 0.0);
    headings.push_back(0.0);
  }
  const ReferencePath path(points, headings, 0.1);
  const DiffDriveModel model(0.1);
  const auto ops = bell_operating_points(path, model);
  ASSERT_EQ(ops.size(), 14u);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    EXPECT_EQ(ops[i].index, static_cast<Eigen::Index>(i));
    EXPECT_DOUBLE_EQ(ops[i].A(0, 3), 0.1);  // d(x')/dv = cos(0) dt
    EXPECT_EQ(ops[i].A(0, 2), 0.0);
    EXPECT_EQ(ops[i].B(3, 0), 1.0);
  }
}

TEST(LinearizeAlong, ConstantReferenceRepeatsTheSamePoint) {
  const DiffDriveModel model(0.1);
  std::vector<Vector> states(6, Vector::Zero(7));
  std::vector<Vector> controls(5, Vector::Zero(2));
  const auto ops = linearize_along(states, controls, model);
  ASSERT_EQ(ops.size(), 5u);
  for (const OperatingPoint& op : ops) {
    EXPECT_EQ((op.A - ops[0].A).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((op.B - ops[0].B).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(op.x_op.cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_THROW(static_cast<void>(linearize_along(states, states, model)),
               std::invalid_argument);
}

TEST(RiccatiRecursion, MatchesIterativeBackwardPassGains) {
  // same LQ data through both routes; the feedback conventions differ by
  // sign (u = u_ff - K dx here, u = u + K dx there)
  const double dt = 0.1;
  const test::LinearModel model = test::double_integrator(dt);
  const int horizon = 20;
  const CostWeights w(Matrix::Identity(4, 4), Matrix::Identity(2, 2),
                      10.0 * Matrix::Identity(4, 4));

  std::vector<Vector> ref_states(horizon, Vector::Zero(4));
  std::vector<Vector> ref_controls(horizon - 1, Vector::Zero(2));
  const auto ops = linearize_along(ref_states, ref_controls, model);
  const auto tv_gains = tv_lqr_gains(ops, w);

  const TrackingCost cost(w, ref_states, ref_controls);
  const IlqrSolver solver(model, cost);
  std::mt19937 rng(23);
  std::vector<Vector> U;
  for (int i = 0; i < horizon - 1; ++i) {
    U.push_back(test::random_vector(rng, 2, -1.0, 1.0));
  }
  const auto X = rollout(model, test::random_vector(rng, 4, -1.0, 1.0), U);
  const BackwardPassResult bp = solver.backward_pass(X, U, 0.0);
  ASSERT_TRUE(bp.success);

  ASSERT_EQ(tv_gains.size(), bp.gains.K.size());
  for (std::size_t i = 0; i < tv_gains.size(); ++i) {
    EXPECT_LT((tv_gains[i] + bp.gains.K[i]).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RiccatiRecursion, CostToGoStaysPositiveSemiDefinite) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const DiffDriveModel model(path.dt());
  const auto ops = bell_operating_points(path, model);
  const RiccatiResult result = riccati_recursion(ops, CostWeights::robot_defaults());
  for (const Matrix& P : result.cost_to_go) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(P, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * (1.0 + P.cwiseAbs().maxCoeff()));
  }
}

TEST(RiccatiRecursion, GainsInvariantUnderJointWeightScaling) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const DiffDriveModel model(path.dt());
  const auto ops = bell_operating_points(path, model);
  const CostWeights base = CostWeights::robot_defaults();
  const double c = 3.7;
  const CostWeights scaled(c * base.Q, c * base.R, c * base.Qf);
  const auto gains_base = tv_lqr_gains(ops, base);
  const auto gains_scaled = tv_lqr_gains(ops, scaled);
  ASSERT_EQ(gains_base.size(), gains_scaled.size());
  for (std::size_t i = 0; i < gains_base.size(); ++i) {
    EXPECT_LT((gains_base[i] - gains_scaled[i]).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RiccatiRecursion, RejectsBadInput) {
  const CostWeights w = CostWeights::robot_defaults();
  EXPECT_THROW(static_cast<void>(riccati_recursion(std::vector<OperatingPoint>{}, w)),
               std::invalid_argument);

  OperatingPoint op;
  op.A = Matrix::Identity(3, 3);  // wrong size for 7-state weights
  op.B = Matrix::Zero(3, 2);
  EXPECT_THROW(static_cast<void>(riccati_recursion(std::vector<OperatingPoint>{op}, w)),
               std::invalid_argument);

  OperatingPoint nan_op;
  nan_op.A = Matrix::Identity(7, 7);
  nan_op.B = Matrix::Zero(7, 2);
  nan_op.B(3, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(static_cast<void>(riccati_recursion(std::vector<OperatingPoint>{nan_op}, w)),
               std::invalid_argument);
}

TEST(Track, ZeroGainsReproduceTheNominalRollout) {
  const DiffDriveModel model(0.1);
  std::vector<ControlInput> controls(30, ControlInput{0.8, 0.3});
  const auto states = rollout(RobotState{}, controls, model);
  const ReferencePath path = ReferencePath::from_nominal(states, controls, 0.1);
  const std::vector<Matrix> zero_gains(controls.size(), Matrix::Zero(2, 7));

  const Trajectory traj = track(path.states().front(), path, path.controls(), zero_gains, model);
  ASSERT_EQ(traj.states.size(), states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    EXPECT_EQ(traj.states[i].x, states[i].x);
    EXPECT_EQ(traj.states[i].y, states[i].y);
    EXPECT_EQ(traj.states[i].theta, states[i].theta);
    EXPECT_EQ(traj.states[i].v, states[i].v);
  }
}

TEST(Track, FeedbackPullsAPerturbedStartBack) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const DiffDriveModel model(path.dt());
  const auto gains = tv_lqr_gains(bell_operating_points(path, model),
                                  CostWeights::robot_defaults());
  RobotState x0 = path.states().front();
  x0.x += 0.1;
  x0.y -= 0.1;
  x0.theta += 0.05;

  const Trajectory traj = track(x0, path, path.controls(), gains, model);
  const TrackingMetrics m = tracking_metrics(traj.states, path);
  const double initial_err = std::hypot(0.1, -0.1);
  EXPECT_LT(m.terminal_pos_err, 0.2 * initial_err);
  EXPECT_LT(m.pos_rmse, 0.2);
}

TEST(Track, SubstepsKeepTracking) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const DiffDriveModel model(path.dt());
  const auto gains = tv_lqr_gains(bell_operating_points(path, model),
                                  CostWeights::robot_defaults());
  const RobotState x0 = path.states().front();

  const Trajectory base = track(x0, path, path.controls(), gains, model, 1);
  const Trajectory by_default = track(x0, path, path.controls(), gains, model);
  for (std::size_t i = 0; i < base.states.size(); ++i) {
    EXPECT_EQ(base.states[i].x, by_default.states[i].x);
    EXPECT_EQ(base.states[i].y, by_default.states[i].y);
  }

  const Trajectory fine = track(x0, path, path.controls(), gains, model, 4);
  ASSERT_EQ(fine.states.size(), path.size());
  ASSERT_EQ(fine.controls.size(), path.size() - 1);
  const TrackingMetrics m = tracking_metrics(fine.states, path);
  EXPECT_LT(m.pos_rmse, 0.2);
}

TEST(Track, RejectsBadArguments) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const DiffDriveModel model(path.dt());
  const std::vector<Matrix> gains(path.size() - 1, Matrix::Zero(2, 7));
  EXPECT_THROW(static_cast<void>(track(path.states().front(), path, path.controls(), gains,
                                       model, 0)),
               std::invalid_argument);
  const std::vector<Matrix> short_gains(path.size() - 2, Matrix::Zero(2, 7));
  EXPECT_THROW(static_cast<void>(track(path.states().front(), path, path.controls(),
                                       short_gains, model)),
               std::invalid_argument);
  const std::vector<Matrix> bad_shape(path.size() - 1, Matrix::Zero(2, 6));
  EXPECT_THROW(static_cast<void>(track(path.states().front(), path, path.controls(), bad_shape,
                                       model)),
               std::invalid_argument);
}

}  // namespace
}  // namespace pathtrack
