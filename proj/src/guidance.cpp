#include "asv/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace asv {

namespace {
constexpr double kTinyLength = 1e-9;
}

PathSpec PathSpec::from_waypoints(const std::vector<Eigen::Vector2d>& waypoints,
                                  double fillet_radius) {
  if (waypoints.size() < 2)
    throw std::invalid_argument("path: need at least 2 waypoints");
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if ((waypoints[i] - waypoints[i - 1]).norm() < kTinyLength)
      throw std::invalid_argument("path: duplicate consecutive waypoints at index " +
                                  std::to_string(i));
  }

  PathSpec p;
  p.waypoints_ = waypoints;
  p.fillet_radius_ = fillet_radius;

  const std::size_t n = waypoints.size();
  // Trim lengths per interior corner; a corner too tight for the requested
  // radius gets a smaller fillet, collinear corners get none.
  std::vector<double> trim(n, 0.0);
  std::vector<double> turn_angle(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Eigen::Vector2d u = (waypoints[i] - waypoints[i - 1]).normalized();
    const Eigen::Vector2d v = (waypoints[i + 1] - waypoints[i]).normalized();
    const double dot = std::clamp(u.dot(v), -1.0, 1.0);
    const double alpha = std::acos(dot);
    turn_angle[i] = alpha;
    if (fillet_radius <= 0.0 || alpha < 1e-9 || alpha > kPi - 1e-6) continue;
    const double len_in = (waypoints[i] - waypoints[i - 1]).norm();
    const double len_out = (waypoints[i + 1] - waypoints[i]).norm();
    const double t_max = 0.5 * std::min(len_in, len_out);
    trim[i] = std::min(fillet_radius * std::tan(alpha / 2.0), t_max);
  }

  double s = 0.0;
  Eigen::Vector2d cursor = waypoints[0];
  for (std::size_t i = 1; i < n; ++i) {
    const Eigen::Vector2d dir = (waypoints[i] - waypoints[i - 1]).normalized();
    const Eigen::Vector2d line_end = waypoints[i] - trim[i] * dir;
    const double line_len = (line_end - cursor).dot(dir);
    if (line_len > kTinyLength) {
      Segment seg;
      seg.arc = false;
      seg.s0 = s;
      seg.len = line_len;
      seg.a = cursor;
      seg.dir = dir;
      p.segments_.push_back(seg);
      s += line_len;
      cursor = line_end;
    }
    if (i + 1 < n && trim[i] > kTinyLength) {
      const Eigen::Vector2d v = (waypoints[i + 1] - waypoints[i]).normalized();
      const double cross = dir.x() * v.y() - dir.y() * v.x();
      const double sign = cross >= 0.0 ? 1.0 : -1.0;
      const double radius = trim[i] / std::tan(turn_angle[i] / 2.0);
      const Eigen::Vector2d normal = sign * Eigen::Vector2d(-dir.y(), dir.x());
      Segment seg;
      seg.arc = true;
      seg.s0 = s;
      seg.len = radius * turn_angle[i];
      seg.center = cursor + radius * normal;
      seg.radius = radius;
      seg.phi0 = std::atan2(cursor.y() - seg.center.y(), cursor.x() - seg.center.x());
      seg.turn = sign;
      p.segments_.push_back(seg);
      s += seg.len;
      cursor = waypoints[i] + trim[i] * v;
    }
  }
  p.length_ = s;
  if (p.segments_.empty()) throw std::invalid_argument("path: degenerate (zero length)");
  return p;
}

const PathSpec::Segment& PathSpec::locate(double s) const {
  // binary search for the segment containing arc length s
  std::size_t lo = 0, hi = segments_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (segments_[mid].s0 <= s)
      lo = mid;
    else
      hi = mid - 1;
  }
  return segments_[lo];
}

Eigen::Vector2d PathSpec::position(double s) const {
  s = std::clamp(s, 0.0, length_);
  const Segment& seg = locate(s);
  const double t = s - seg.s0;
  if (!seg.arc) return seg.a + t * seg.dir;
  const double phi = seg.phi0 + seg.turn * t / seg.radius;
  return seg.center + seg.radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
}

Eigen::Vector2d PathSpec::tangent(double s) const {
  s = std::clamp(s, 0.0, length_);
  const Segment& seg = locate(s);
  if (!seg.arc) return seg.dir;
  const double phi = seg.phi0 + seg.turn * (s - seg.s0) / seg.radius;
  return seg.turn * Eigen::Vector2d(-std::sin(phi), std::cos(phi));
}

Eigen::Vector2d PathSpec::second_derivative(double s) const {
  s = std::clamp(s, 0.0, length_);
  const Segment& seg = locate(s);
  if (!seg.arc) return Eigen::Vector2d::Zero();
  const double phi = seg.phi0 + seg.turn * (s - seg.s0) / seg.radius;
  return -Eigen::Vector2d(std::cos(phi), std::sin(phi)) / seg.radius;
}

double PathSpec::path_angle(double s) const {
  const Eigen::Vector2d t = tangent(s);
  return std::atan2(t.y(), t.x());
}

namespace {

// squared-distance derivatives at omega
inline void distance_derivatives(const PathSpec& path, const Eigen::Vector2d& pos,
                                 double omega, double& g1, double& g2) {
  const Eigen::Vector2d delta = pos - path.position(omega);
  g1 = -delta.dot(path.tangent(omega));
  g2 = 1.0 - delta.dot(path.second_derivative(omega));
}

double grid_refine(const PathSpec& path, const Eigen::Vector2d& pos, double omega_init) {
  const double dist = (pos - path.position(omega_init)).norm();
  const double window = std::max(2.0 * dist, 0.02 * path.length());
  const double lo = std::max(0.0, omega_init - window);
  const double hi = std::min(path.length(), omega_init + window);
  const int kSamples = 400;
  double best_w = omega_init;
  double best_d = dist;
  for (int i = 0; i <= kSamples; ++i) {
    const double w = lo + (hi - lo) * i / kSamples;
    const double d = (pos - path.position(w)).norm();
    if (d < best_d) {
      best_d = d;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace

ProjectionResult project_onto_path(const PathSpec& path, const Eigen::Vector2d& pos,
                                   double omega_init, int max_iter) {
  ProjectionResult res;
  double w = std::clamp(omega_init, 0.0, path.length());
  for (int pass = 0; pass < 2; ++pass) {
    for (int it = 0; it < max_iter; ++it) {
      double g1, g2;
      distance_derivatives(path, pos, w, g1, g2);
      if (!(g2 > 1e-12)) break;  // not locally convex here, bail to grid
      const double next = std::clamp(w - g1 / g2, 0.0, path.length());
      const double delta = next - w;
      w = next;
      res.iterations++;
      if (std::abs(delta) < 1e-6) {
        res.omega = w;
        res.converged = true;
        return res;
      }
    }
    if (pass == 0) {
      // Newton stalled: coarse grid around the warm start, then retry.
      w = grid_refine(path, pos, std::clamp(omega_init, 0.0, path.length()));
      res.used_fallback = true;
    }
  }
  res.omega = w;
  res.converged = false;
  return res;
}

double cross_track_error(const PathSpec& path, const Eigen::Vector2d& pos, double omega) {
  return (pos - path.position(omega)).norm();
}

double heading_error(const PathSpec& path, const VesselState& state, double omega,
                     double lookahead) {
  const Eigen::Vector2d target = path.position(omega + lookahead);
  const Eigen::Vector2d delta = target - state.position();
  if (delta.norm() < 1e-12) return 0.0;
  return wrap_angle(std::atan2(delta.y(), delta.x()) - state.psi);
}

double lookahead_heading_error(const PathSpec& path, const VesselState& state,
                               double omega, double lookahead) {
  const double s = std::clamp(omega + lookahead, 0.0, path.length());
  return wrap_angle(path.path_angle(s) - state.psi);
}

NavFeatures nav_features(const PathSpec& path, const VesselState& state,
                         double omega_prev, double lookahead) {
  const ProjectionResult proj = project_onto_path(path, state.position(), omega_prev);
  NavFeatures f;
  f.surge = state.u;
  f.sway = state.v;
  f.yaw_rate = state.r;
  f.cross_track = cross_track_error(path, state.position(), proj.omega);
  f.heading_err = heading_error(path, state, proj.omega, lookahead);
  f.heading_err_la = lookahead_heading_error(path, state, proj.omega, lookahead);
  f.omega = proj.omega;
  f.progress = proj.omega / path.length();
  f.projection_fallback = proj.used_fallback;
  return f;
}

}  // namespace asv
