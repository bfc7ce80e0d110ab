#include "pathtrack/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pathtrack/errors.hpp"

namespace pathtrack {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_geometry(std::span<const Eigen::Vector2d> points, std::span<const double> headings) {
  if (points.size() != headings.size()) {
    throw std::invalid_argument("reference path: points and headings must match in length");
  }
  if (points.size() < 2) {
    throw std::invalid_argument("reference path: need at least two points");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) {
      throw std::invalid_argument("reference path: non-finite point");
    }
  }
  for (double h : headings) {
    if (!std::isfinite(h)) {
      throw std::invalid_argument("reference path: non-finite heading");
    }
  }
}

}  // namespace

double wrap_angle(double angle) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double wrapped = angle - kTwoPi * std::floor((angle + std::numbers::pi) / kTwoPi);
  // floor rounding can leave exactly +pi when angle is a hair below a wrap
  // boundary; fold it down so the interval stays half-open
  if (wrapped >= std::numbers::pi) {
    wrapped -= kTwoPi;
  }
  return wrapped;
}

ReferencePath::ReferencePath(std::vector<Eigen::Vector2d> points,
                             std::vector<double> headings,
                             double dt)
    : points_(std::move(points)), headings_(std::move(headings)), dt_(dt) {
  check_geometry(points_, headings_);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("reference path: dt must be positive and finite");
  }
  controls_ = nominal_controls(points_, headings_, dt_);
  states_ = path_to_states(points_, headings_, controls_);
}

ReferencePath ReferencePath::from_nominal(std::vector<RobotState> states,
                                          std::vector<ControlInput> controls,
                                          double dt) {
  if (states.size() < 2 || controls.size() + 1 != states.size()) {
    throw std::invalid_argument("ReferencePath::from_nominal: need n states and n-1 controls, n >= 2");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("ReferencePath::from_nominal: dt must be positive and finite");
  }
  ReferencePath path;
  path.dt_ = dt;
  path.points_.reserve(states.size());
  path.headings_.reserve(states.size());
  for (const RobotState& s : states) {
    path.points_.emplace_back(s.x, s.y);
    path.headings_.push_back(s.theta);
  }
  path.states_ = std::move(states);
  path.controls_ = std::move(controls);
  return path;
}

std::vector<Vector> ReferencePath::state_vectors() const {
  std::vector<Vector> out;
  out.reserve(states_.size());
  for (const RobotState& s : states_) {
    out.push_back(s.to_vector());
  }
  return out;
}

std::vector<Vector> ReferencePath::control_vectors() const {
  std::vector<Vector> out;
  out.reserve(controls_.size());
  for (const ControlInput& u : controls_) {
    out.push_back(u.to_vector());
  }
  return out;
}

double ReferencePath::arc_length() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    total += (points_[i + 1] - points_[i]).norm();
  }
  return total;
}

ReferencePath generate_bell(const BellPathParams& params) {
  if (params.n_points < 2) {
    throw std::invalid_argument("generate_bell: n_points must be at least 2");
  }
  if (!(params.length > 0.0) || !(params.width_sigma > 0.0) || !(params.dt > 0.0)) {
    throw std::invalid_argument("generate_bell: length, width_sigma and dt must be positive");
  }
  const int n = params.n_points;
  const double peak_s = params.center * params.length;
  const double two_sigma_sq = 2.0 * params.width_sigma * params.width_sigma;
  const double ci = std::cos(params.incline);
  const double si = std::sin(params.incline);

  std::vector<Eigen::Vector2d> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = params.length * static_cast<double>(i) / static_cast<double>(n - 1);
    const double ds = s - peak_s;
    const double y = params.height * std::exp(-ds * ds / two_sigma_sq);
    points.emplace_back(ci * s - si * y, si * s + ci * y);
  }

  // headings from the sampled geometry: central differences inside, one-sided
  // at the ends
  std::vector<double> headings(n);
  headings[0] = std::atan2(points[1].y() - points[0].y(), points[1].x() - points[0].x());
  headings[n - 1] =
      std::atan2(points[n - 1].y() - points[n - 2].y(), points[n - 1].x() - points[n - 2].x());
  for (int i = 1; i + 1 < n; ++i) {
    const Eigen::Vector2d d = points[i + 1] - points[i - 1];
    headings[i] = std::atan2(d.y(), d.x());
  }

  return ReferencePath(std::move(points), std::move(headings), params.dt);
}

std::vector<ControlInput> nominal_controls(std::span<const Eigen::Vector2d> points,
                                           std::span<const double> headings,
                                           double dt) {
  check_geometry(points, headings);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("nominal_controls: dt must be positive and finite");
  }
  std::vector<ControlInput> controls;
  controls.reserve(points.size() - 1);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double chord = (points[k + 1] - points[k]).norm();
    const double dtheta = wrap_angle(headings[k + 1] - headings[k]);
    controls.push_back(ControlInput{chord / dt, dtheta / dt});
  }
  return controls;
}

std::vector<ControlInput> nominal_controls(const ReferencePath& path) {
  return nominal_controls(path.points(), path.headings(), path.dt());
}

std::vector<RobotState> path_to_states(std::span<const Eigen::Vector2d> points,
                                       std::span<const double> headings,
                                       std::span<const ControlInput> u_ff) {
  check_geometry(points, headings);
  if (u_ff.size() + 1 != points.size()) {
    throw std::invalid_argument("path_to_states: need one control per segment");
  }
  std::vector<RobotState> states;
  states.reserve(points.size());
  states.push_back(RobotState{points[0].x(), points[0].y(), headings[0], 0.0, 0.0, 0.0, 0.0});
  for (std::size_t k = 1; k < points.size(); ++k) {
    RobotState s;
    s.x = points[k].x();
    s.y = points[k].y();
    s.theta = headings[k];
    s.v = u_ff[k - 1].v_cmd;
    s.omega = u_ff[k - 1].omega_cmd;
    const double prev_v = (k >= 2) ? u_ff[k - 2].v_cmd : 0.0;
    const double prev_omega = (k >= 2) ? u_ff[k - 2].omega_cmd : 0.0;
    s.dv = s.v - prev_v;
    s.domega = s.omega - prev_omega;
    states.push_back(s);
  }
  return states;
}

std::vector<RobotState> path_to_states(const ReferencePath& path) {
  return path_to_states(path.points(), path.headings(), path.controls());
}

std::vector<std::size_t> spacing_violations(const ReferencePath& path, double v_max) {
  if (!(v_max > 0.0)) {
    throw std::invalid_argument("spacing_violations: v_max must be positive");
  }
  const double limit = v_max * path.dt();
  std::vector<std::size_t> violations;
  const auto& points = path.points();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if ((points[i + 1] - points[i]).norm() > limit) {
      violations.push_back(i);
    }
  }
  return violations;
}

TrackingMetrics tracking_metrics(std::span<const RobotState> states, const ReferencePath& ref) {
  if (states.size() != ref.size()) {
    throw std::invalid_argument("tracking_metrics: sequence lengths differ");
  }
  TrackingMetrics m;
  double pos_sq = 0.0;
  double head_sq = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Eigen::Vector2d p(states[i].x, states[i].y);
    err = (p - ref.points()[i]).norm();
    const double herr = wrap_angle(states[i].theta - ref.headings()[i]);
    pos_sq += err * err;
    head_sq += herr * herr;
    m.max_pos_err = std::max(m.max_pos_err, err);
  }
  const double n = static_cast<double>(states.size());
  m.pos_rmse = std::sqrt(pos_sq / n);
  m.heading_rmse = std::sqrt(head_sq / n);
  m.terminal_pos_err = err;
  return m;
}

void save_path_csv(const ReferencePath& path, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw IoError("save_path_csv: cannot open " + file.string());
  }
  out << "s,x,y,theta\n";
  char buf[128];
  double s = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) {
      s += (path.points()[i] - path.points()[i - 1]).norm();
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s, path.points()[i].x(),
                  path.points()[i].y(), path.headings()[i]);
    out << buf;
  }
  if (!out) {
    throw IoError("save_path_csv: write failed for " + file.string());
  }
}

ReferencePath load_path_csv(const std::filesystem::path& file, double dt) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("load_path_csv: cannot open " + file.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "s,x,y,theta") {
    throw IoError("load_path_csv: expected header s,x,y,theta in " + file.string());
  }
  std::vector<Eigen::Vector2d> points;
  std::vector<double> headings;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    double vals[4];
    char comma = ',';
    row >> vals[0];
    for (int k = 1; k < 4 && row; ++k) {
      row >> comma >> vals[k];
    }
    if (!row || comma != ',') {
      throw IoError("load_path_csv: malformed row " + std::to_string(lineno) + " in " +
                    file.string());
    }
    points.emplace_back(vals[1], vals[2]);
    headings.push_back(vals[3]);
  }
  if (points.size() < 2) {
    throw IoError("load_path_csv: need at least two rows in " + file.string());
  }
  return ReferencePath(std::move(points), std::move(headings), dt);
}

}  // namespace pathtrack
