#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asv/common.hpp"
#include "asv/dynamics.hpp"

namespace asv {

// Arc-length parameterized planar curve built from waypoints: straight
// segments joined by circular fillets (radius 0 gives a plain polyline).
// Evaluation outside [0, length] clamps to the endpoints.
class PathSpec {
 public:
  static PathSpec from_waypoints(const std::vector<Eigen::Vector2d>& waypoints,
                                 double fillet_radius);

  Eigen::Vector2d position(double s) const;
  Eigen::Vector2d tangent(double s) const;            // unit vector
  Eigen::Vector2d second_derivative(double s) const;  // curvature * inward normal
  double path_angle(double s) const;                  // gamma_p = atan2(y', x')
  double length() const { return length_; }
  const std::vector<Eigen::Vector2d>& waypoints() const { return waypoints_; }
  double fillet_radius() const { return fillet_radius_; }

 private:
  struct Segment {
    bool arc = false;
    double s0 = 0.0;
    double len = 0.0;
    Eigen::Vector2d a = Eigen::Vector2d::Zero();    // line start
    Eigen::Vector2d dir = Eigen::Vector2d::Zero();  // line unit direction
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
    double phi0 = 0.0;  // angle of (start - center)
    double turn = 1.0;  // +1 / -1 sweep direction
  };

  const Segment& locate(double s) const;

  std::vector<Segment> segments_;
  std::vector<Eigen::Vector2d> waypoints_;
  double length_ = 0.0;
  double fillet_radius_ = 0.0;
};

struct ProjectionResult {
  double omega = 0.0;       // arg-min arc length, clamped to [0, L]
  bool converged = false;   // Newton converged within the iteration cap
  bool used_fallback = false;
  int iterations = 0;
};

// Local minimizer of the squared distance to the path, warm-started at
// omega_init (Newton-Raphson, |delta| < 1e-6 m stop, at most max_iter
// steps). Falls back to a coarse grid refinement around the warm start
// when Newton fails, and flags it.
ProjectionResult project_onto_path(const PathSpec& path, const Eigen::Vector2d& pos,
                                   double omega_init, int max_iter = 20);

double cross_track_error(const PathSpec& path, const Eigen::Vector2d& pos, double omega);

// Heading change needed to point straight at the look-ahead point; zero when
// the vessel sits exactly on it.
double heading_error(const PathSpec& path, const VesselState& state, double omega,
                     double lookahead);

// Difference between the path tangent angle at the look-ahead point and the
// vessel heading.
double lookahead_heading_error(const PathSpec& path, const VesselState& state,
                               double omega, double lookahead);

// The six navigation features fed to the agent plus internal bookkeeping.
struct NavFeatures {
  double surge = 0.0;
  double sway = 0.0;
  double yaw_rate = 0.0;
  double cross_track = 0.0;
  double heading_err = 0.0;
  double heading_err_la = 0.0;
  double omega = 0.0;     // current path parameter (not fed to the agent)
  double progress = 0.0;  // omega / length
  bool projection_fallback = false;
};

NavFeatures nav_features(const PathSpec& path, const VesselState& state,
                         double omega_prev, double lookahead);

}  // namespace asv
