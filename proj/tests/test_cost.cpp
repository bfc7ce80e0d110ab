#include "pathtrack/cost.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "support/test_models.hpp"

namespace pathtrack {
namespace {

constexpr double kPi = std::numbers::pi;

CostWeights identity_weights() {
  return CostWeights(Matrix::Identity(7, 7), Matrix::Identity(2, 2), Matrix::Identity(7, 7));
}

TEST(CostWeightsTest, ValidatesDefiniteness) {
  EXPECT_NO_THROW(CostWeights::robot_defaults());
  EXPECT_NO_THROW(identity_weights());

  // R with a zero eigenvalue is not positive definite
  Vector r_sing(2);
  r_sing << 1.0, 0.0;
  Vector q(7);
  q << 10, 10, 1, 0.1, 0.1, 0, 0;
  EXPECT_THROW(CostWeights::diagonal(q, r_sing, 10.0 * q), std::invalid_argument);

  // Q with a negative eigenvalue is not positive semi-definite
  Vector q_neg = q;
  q_neg(6) = -1e-3;
  Vector r(2);
  r << 1.0, 1.0;
  EXPECT_THROW(CostWeights::diagonal(q_neg, r, 10.0 * q), std::invalid_argument);

  // asymmetry is rejected outright
  Matrix q_asym = Matrix::Identity(7, 7);
  q_asym(0, 1) = 0.5;
  EXPECT_THROW(CostWeights(q_asym, Matrix::Identity(2, 2), Matrix::Identity(7, 7)),
               std::invalid_argument);
}

TEST(CostWeightsTest, DefaultsMatchDocumentedDiagonals) {
  const CostWeights w = CostWeights::robot_defaults();
  Vector q_expected(7);
  q_expected << 10, 10, 1, 0.1, 0.1, 0, 0;
  EXPECT_EQ((w.Q.diagonal() - q_expected).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((w.Qf.diagonal() - 10.0 * q_expected).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(w.R(0, 0), 1.0);
  EXPECT_EQ(w.R(1, 1), 1.0);
}

TEST(RunningCost, UnitStateErrorCostsOneHalf) {
  const CostWeights w = identity_weights();
  const RobotState x{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(running_cost(x, ControlInput{}, RobotState{}, ControlInput{}, w), 0.5);
}

TEST(RunningCost, UnitControlErrorCostsOneHalf) {
  const CostWeights w = identity_weights();
  EXPECT_DOUBLE_EQ(running_cost(RobotState{}, ControlInput{1.0, 0.0}, RobotState{},
                                ControlInput{}, w),
                   0.5);
}

TEST(RunningCost, HeadingErrorWrapsAcrossSeam) {
  Vector q = Vector::Zero(7);
  q(2) = 1.0;
  Vector r(2);
  r << 1.0, 1.0;
  const CostWeights w = CostWeights::diagonal(q, r, q);
  RobotState x;
  x.theta = kPi - 0.1;
  RobotState ref;
  ref.theta = -kPi + 0.1;
  // the wrapped error is -0.2, not nearly 2*pi
  EXPECT_NEAR(running_cost(x, ControlInput{}, ref, ControlInput{}, w), 0.5 * 0.04, 1e-12);
  EXPECT_NEAR(final_cost(x, ref, w), 0.5 * 0.04, 1e-12);
}

TEST(RunningCost, InvariantUnderFullTurnOfBothHeadings) {
  const CostWeights w = CostWeights::robot_defaults();
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    RobotState x = RobotState::from_vector(test::random_vector(rng, 7, -2.0, 2.0));
    RobotState ref = RobotState::from_vector(test::random_vector(rng, 7, -2.0, 2.0));
    const ControlInput u{0.4, -0.2};
    const double base = running_cost(x, u, ref, ControlInput{}, w);
    x.theta += 2.0 * kPi;
    EXPECT_NEAR(running_cost(x, u, ref, ControlInput{}, w), base, 1e-9);
    ref.theta += 2.0 * kPi;
    EXPECT_NEAR(running_cost(x, u, ref, ControlInput{}, w), base, 1e-9);
  }
}

TEST(CostDerivativesTest, MatchFiniteDifferences) {
  const CostWeights w = CostWeights::robot_defaults();
  std::mt19937 rng(17);
  const double eps = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const RobotState x = RobotState::from_vector(test::random_vector(rng, 7, -2.0, 2.0));
    const RobotState ref = RobotState::from_vector(test::random_vector(rng, 7, -1.0, 1.0));
    const ControlInput u = ControlInput::from_vector(test::random_vector(rng, 2, -2.0, 2.0));
    const ControlInput u_ref = ControlInput::from_vector(test::random_vector(rng, 2, -1.0, 1.0));
    const CostDerivatives d = cost_derivatives(x, u, ref, u_ref, w);

    Vector fd_lx(7);
    for (int j = 0; j < 7; ++j) {
      Vector hi = x.to_vector();
      Vector lo = x.to_vector();
      hi(j) += eps;
      lo(j) -= eps;
      fd_lx(j) = (running_cost(RobotState::from_vector(hi), u, ref, u_ref, w) -
                  running_cost(RobotState::from_vector(lo), u, ref, u_ref, w)) /
                 (2.0 * eps);
    }
    EXPECT_LT(test::max_relative_error(d.l_x, fd_lx, 1e-9), 1e-6);

    Vector fd_lu(2);
    for (int j = 0; j < 2; ++j) {
      Vector hi = u.to_vector();
      Vector lo = u.to_vector();
      hi(j) += eps;
      lo(j) -= eps;
      fd_lu(j) = (running_cost(x, ControlInput::from_vector(hi), ref, u_ref, w) -
                  running_cost(x, ControlInput::from_vector(lo), ref, u_ref, w)) /
                 (2.0 * eps);
    }
    EXPECT_LT(test::max_relative_error(d.l_u, fd_lu, 1e-9), 1e-6);

    // the quadratic form makes the Hessian blocks the weights themselves
    EXPECT_EQ((d.l_xx - w.Q).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((d.l_uu - w.R).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(d.l_ux.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(TotalCost, ZeroAlongTheReferenceItself) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const CostWeights w = CostWeights::robot_defaults();
  EXPECT_EQ(total_cost(path.states(), path.controls(), path, w), 0.0);
}

TEST(TotalCost, MatchesBruteForceResummation) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const CostWeights w = CostWeights::robot_defaults();
  const DiffDriveModel model(path.dt());
  const auto states = rollout(path.states().front(), path.controls(), model);

  // independent accumulation straight from the definition
  double expected = 0.0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    Vector e = states[k].to_vector() - path.states()[k].to_vector();
    e(2) = wrap_angle(e(2));
    const Vector eu = path.controls()[k].to_vector() - path.controls()[k].to_vector();
    expected += 0.5 * e.dot(w.Q * e) + 0.5 * eu.dot(w.R * eu);
  }
  Vector ef = states.back().to_vector() - path.states().back().to_vector();
  ef(2) = wrap_angle(ef(2));
  expected += 0.5 * ef.dot(w.Qf * ef);

  const double actual = total_cost(states, path.controls(), path, w);
  EXPECT_NEAR(actual, expected, 1e-12 * (1.0 + expected));
}

TEST(TotalCost, RejectsLengthMismatch) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const CostWeights w = CostWeights::robot_defaults();
  std::vector<RobotState> states = path.states();
  states.pop_back();
  EXPECT_THROW(static_cast<void>(total_cost(states, path.controls(), path, w)),
               std::invalid_argument);
}

TEST(CostToGo, TelescopesOverTheHorizon) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const CostWeights w = CostWeights::robot_defaults();
  const DiffDriveModel model(path.dt());
  std::vector<ControlInput> controls = path.controls();
  for (ControlInput& u : controls) {
    u.v_cmd *= 0.95;  // make the run imperfect so the costs are non-trivial
  }
  const auto states = rollout(path.states().front(), controls, model);

  const double total = total_cost(states, controls, path, w);
  EXPECT_NEAR(cost_to_go(states, controls, path, w, 0), total, 1e-12 * (1.0 + total));
  for (Eigen::Index t = 0; t + 1 < static_cast<Eigen::Index>(states.size()); ++t) {
    const double here = cost_to_go(states, controls, path, w, t);
    const double next = cost_to_go(states, controls, path, w, t + 1);
    const double stage = running_cost(states[t], controls[t], path.states()[t],
                                      path.controls()[t], w);
    EXPECT_NEAR(here - next, stage, 1e-12 * (1.0 + std::abs(here)));
  }
  EXPECT_THROW(static_cast<void>(cost_to_go(states, controls, path, w, -1)),
               std::invalid_argument);
  EXPECT_THROW(
      static_cast<void>(cost_to_go(states, controls, path, w, path.size())),
      std::invalid_argument);
}

TEST(TrackingCostTest, AgreesWithTypedFunctions) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const CostWeights w = CostWeights::robot_defaults();
  const TrackingCost cost = TrackingCost::for_path(path, w);
  const DiffDriveModel model(path.dt());
  std::vector<ControlInput> controls = path.controls();
  for (std::size_t i = 0; i < controls.size(); i += 3) {
    controls[i].omega_cmd += 0.05;
  }
  const auto states = rollout(path.states().front(), controls, model);

  std::vector<Vector> X;
  for (const RobotState& s : states) {
    X.push_back(s.to_vector());
  }
  std::vector<Vector> U;
  for (const ControlInput& u : controls) {
    U.push_back(u.to_vector());
  }
  const double via_interface = cost.total(X, U);
  const double via_typed = total_cost(states, controls, path, w);
  EXPECT_NEAR(via_interface, via_typed, 1e-12 * (1.0 + via_typed));
}

TEST(TrackingCostTest, AbsolutePenaltyChargesRawControls) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const CostWeights w = CostWeights::robot_defaults();
  const TrackingCost deviation = TrackingCost::for_path(path, w, ControlPenalty::kDeviation);
  const TrackingCost absolute = TrackingCost::for_path(path, w, ControlPenalty::kAbsolute);
  const Vector x = path.states()[1].to_vector();
  const Vector u = path.controls()[1].to_vector();
  EXPECT_EQ(deviation.running(1, x, u), 0.0);
  EXPECT_GT(absolute.running(1, x, u), 0.0);
  EXPECT_NEAR(absolute.running(1, x, u), 0.5 * u.dot(w.R * u), 1e-12);
}

TEST(TrackingCostTest, RejectsBadStageIndex) {
  const ReferencePath path = generate_bell(BellPathParams{});
  const TrackingCost cost = TrackingCost::for_path(path, CostWeights::robot_defaults());
  const Vector x = Vector::Zero(7);
  const Vector u = Vector::Zero(2);
  EXPECT_THROW(static_cast<void>(cost.running(-1, x, u)), std::invalid_argument);
  EXPECT_THROW(static_cast<void>(cost.running(cost.horizon() - 1, x, u)),
               std::invalid_argument);
  EXPECT_NO_THROW(static_cast<void>(cost.running(cost.horizon() - 2, x, u)));
}

}  // namespace
}  // namespace pathtrack
