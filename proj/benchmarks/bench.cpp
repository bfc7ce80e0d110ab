#include <benchmark/benchmark.h>

#include <vector>

#include "pathtrack/dynamics.hpp"
#include "pathtrack/ilqr.hpp"
#include "pathtrack/lqr.hpp"
#include "pathtrack/path.hpp"

namespace {

using namespace pathtrack;

const ReferencePath& bell() {
  static const ReferencePath path = generate_bell(BellPathParams{});
  return path;
}

void BM_DiffDriveStep(benchmark::State& state) {
  const DiffDriveModel model(0.1);
  const Vector x = (Vector(7) << 1.0, 2.0, 0.3, 0.5, 0.1, 0.0, 0.0).finished();
  const Vector u = (Vector(2) << 0.6, 0.2).finished();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.step(x, u));
  }
}
BENCHMARK(BM_DiffDriveStep);

void BM_AnalyticJacobians(benchmark::State& state) {
  const DiffDriveModel model(0.1);
  const Vector x = (Vector(7) << 1.0, 2.0, 0.3, 0.5, 0.1, 0.0, 0.0).finished();
  const Vector u = (Vector(2) << 0.6, 0.2).finished();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.jacobian_x(x, u));
    benchmark::DoNotOptimize(model.jacobian_u(x, u));
  }
}
BENCHMARK(BM_AnalyticJacobians);

void BM_FiniteDifferenceJacobians(benchmark::State& state) {
  const DiffDriveModel model(0.1);
  const Vector x = (Vector(7) << 1.0, 2.0, 0.3, 0.5, 0.1, 0.0, 0.0).finished();
  const Vector u = (Vector(2) << 0.6, 0.2).finished();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fd_jacobians(model, x, u));
  }
}
BENCHMARK(BM_FiniteDifferenceJacobians);

void BM_GainScheduleBell(benchmark::State& state) {
  const ReferencePath& path = bell();
  const DiffDriveModel model(path.dt());
  const auto ops = linearize_along(path.state_vectors(), path.control_vectors(), model);
  const CostWeights weights = CostWeights::robot_defaults();
  for (auto _ : state) {
    benchmark::DoNotOptimize(tv_lqr_gains(ops, weights));
  }
}
BENCHMARK(BM_GainScheduleBell);

void BM_BackwardPassBell(benchmark::State& state) {
  const ReferencePath& path = bell();
  const DiffDriveModel model(path.dt());
  const TrackingCost cost = TrackingCost::for_path(path, CostWeights::robot_defaults());
  const IlqrSolver solver(model, cost);
  const std::vector<Vector> U = path.control_vectors();
  const std::vector<Vector> X = rollout(model, path.states().front().to_vector(), U);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.backward_pass(X, U, 1e-6));
  }
}
BENCHMARK(BM_BackwardPassBell);

void BM_SolveBell(benchmark::State& state) {
  const ReferencePath& path = bell();
  const DiffDriveModel model(path.dt());
  const TrackingCost cost = TrackingCost::for_path(path, CostWeights::robot_defaults());
  const IlqrSolver solver(model, cost);
  const Vector x0 = path.states().front().to_vector();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve(x0, path.control_vectors()));
  }
}
BENCHMARK(BM_SolveBell);

void BM_ClosedLoopTrackBell(benchmark::State& state) {
  const ReferencePath& path = bell();
  const DiffDriveModel model(path.dt());
  const auto ops = linearize_along(path.state_vectors(), path.control_vectors(), model);
  const auto gains = tv_lqr_gains(ops, CostWeights::robot_defaults());
  RobotState x0 = path.states().front();
  x0.x += 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(track(x0, path, path.controls(), gains, model));
  }
}
BENCHMARK(BM_ClosedLoopTrackBell);

}  // namespace

BENCHMARK_MAIN();
