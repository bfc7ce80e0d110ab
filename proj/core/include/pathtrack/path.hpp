#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "pathtrack/dynamics.hpp"
#include "pathtrack/types.hpp"

namespace pathtrack {

/// Wraps an angle into [-pi, pi). The upper bound is exclusive: wrap_angle(pi)
/// returns -pi. Throws std::invalid_argument for non-finite input.
[[nodiscard]] double wrap_angle(double angle);

/// Bell-shaped test path: a Gaussian bump y(s) = height * exp(-(s - center *
/// length)^2 / (2 width_sigma^2)) sampled uniformly over s in [0, length] and
/// rotated by incline about the origin.
struct BellPathParams {
  double length{10.0};      ///< extent along the unrotated x axis [m]
  double height{2.0};       ///< bump peak [m]
  double center{0.5};       ///< bump location as a fraction of length
  double width_sigma{1.5};  ///< Gaussian width [m]
  double incline{0.3};      ///< rotation of the whole path [rad]
  int n_points{200};
  double dt{0.1};           ///< time spacing between consecutive points [s]
};

/// Timed reference: waypoints with headings, plus the feedforward controls and
/// augmented states consistent with traversing them at one point per dt.
/// u_ff has one entry fewer than points; headings match points one to one.
class ReferencePath {
 public:
  /// Derives u_ff and the augmented states from the geometry.
  ReferencePath(std::vector<Eigen::Vector2d> points, std::vector<double> headings, double dt);

  /// Wraps sequences that are already dynamically consistent (for example a
  /// rollout of hand-picked controls), keeping them verbatim.
  [[nodiscard]] static ReferencePath from_nominal(std::vector<RobotState> states,
                                                  std::vector<ControlInput> controls,
                                                  double dt);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] const std::vector<Eigen::Vector2d>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& headings() const { return headings_; }
  [[nodiscard]] const std::vector<RobotState>& states() const { return states_; }
  [[nodiscard]] const std::vector<ControlInput>& controls() const { return controls_; }

  /// Copies of the state/control sequences as plain vectors, for solvers that
  /// work on Eigen types.
  [[nodiscard]] std::vector<Vector> state_vectors() const;
  [[nodiscard]] std::vector<Vector> control_vectors() const;

  /// Polyline arc length [m].
  [[nodiscard]] double arc_length() const;

 private:
  ReferencePath() = default;

  std::vector<Eigen::Vector2d> points_;
  std::vector<double> headings_;
  std::vector<RobotState> states_;
  std::vector<ControlInput> controls_;
  double dt_{0.0};
};

[[nodiscard]] ReferencePath generate_bell(const BellPathParams& params);

/// Feedforward controls that traverse the waypoints one per dt: v from chord
/// length, omega from the wrapped heading increment.
[[nodiscard]] std::vector<ControlInput> nominal_controls(std::span<const Eigen::Vector2d> points,
                                                         std::span<const double> headings,
                                                         double dt);
[[nodiscard]] std::vector<ControlInput> nominal_controls(const ReferencePath& path);

/// Augmented states along the path: pose from the geometry, velocities from
/// the incoming control, deltas from consecutive control differences. The
/// first state has zeros in all velocity-derived fields.
[[nodiscard]] std::vector<RobotState> path_to_states(std::span<const Eigen::Vector2d> points,
                                                     std::span<const double> headings,
                                                     std::span<const ControlInput> u_ff);
[[nodiscard]] std::vector<RobotState> path_to_states(const ReferencePath& path);

/// Indices i where |points[i+1] - points[i]| exceeds v_max * dt. Advisory
/// only; callers decide whether to warn.
[[nodiscard]] std::vector<std::size_t> spacing_violations(const ReferencePath& path, double v_max);

struct TrackingMetrics {
  double pos_rmse{0.0};          ///< RMS planar position error [m]
  double heading_rmse{0.0};      ///< RMS wrapped heading error [rad]
  double max_pos_err{0.0};       ///< worst planar position error [m]
  double terminal_pos_err{0.0};  ///< planar position error at the last point [m]
};

/// Pointwise errors between an executed state sequence and the reference.
/// Requires states.size() == ref.size().
[[nodiscard]] TrackingMetrics tracking_metrics(std::span<const RobotState> states,
                                               const ReferencePath& ref);

/// CSV with header s,x,y,theta where s is cumulative arc length. Values are
/// written with 17 significant digits so a round trip is exact.
void save_path_csv(const ReferencePath& path, const std::filesystem::path& file);
[[nodiscard]] ReferencePath load_path_csv(const std::filesystem::path& file, double dt);

}  // namespace pathtrack
