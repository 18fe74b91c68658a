#pragma once

#include <Eigen/Dense>
#include <string>

#include "asv/common.hpp"

namespace asv {

// Planar pose and body-frame velocity of a surface vessel.
// x is the north position, y the east position (NED tangent frame),
// psi the heading measured clockwise from north, wrapped to (-pi, pi].
struct VesselState {
  double x = 0.0;    // north (m)
  double y = 0.0;    // east (m)
  double psi = 0.0;  // yaw (rad)
  double u = 0.0;    // surge velocity (m/s)
  double v = 0.0;    // sway velocity (m/s)
  double r = 0.0;    // yaw rate (rad/s)

  Eigen::Vector3d pose() const { return {x, y, psi}; }
  Eigen::Vector3d velocity() const { return {u, v, r}; }
  Eigen::Vector2d position() const { return {x, y}; }
  bool finite() const;
};

// Surge force and yaw moment commanded by the controller.
struct ControlInput {
  double surge_force = 0.0;  // N
  double yaw_moment = 0.0;   // N*m
};

// 3-DOF maneuvering model:  M nu_dot + C(nu) nu + D(nu) nu = B f.
// The Coriolis matrix is derived from M (rigid body plus added mass in one),
// damping is linear plus velocity-modulus terms, all loadable from a plain
// key-value config file.
struct VesselModel {
  Eigen::Matrix3d mass = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d mass_inv = Eigen::Matrix3d::Identity();  // precomputed at load
  Eigen::Matrix3d damping_linear = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d damping_quad_u = Eigen::Matrix3d::Zero();  // scaled by |u|
  Eigen::Matrix3d damping_quad_v = Eigen::Matrix3d::Zero();  // scaled by |v|
  Eigen::Matrix3d damping_quad_r = Eigen::Matrix3d::Zero();  // scaled by |r|
  Eigen::Matrix<double, 3, 2> actuation = Eigen::Matrix<double, 3, 2>::Zero();
  double length = 1.0;     // m
  double width = 0.25;     // m
  double max_speed = 2.0;  // m/s
  double max_surge_force = 1.0;  // N
  double max_yaw_moment = 1.0;   // N*m

  Eigen::Matrix3d coriolis(const Eigen::Vector3d& nu) const;
  Eigen::Matrix3d damping(const Eigen::Vector3d& nu) const;

  ControlInput saturate(const ControlInput& f) const;
  // Maps a normalized action in [-1,1]^2 to a saturated (T_u, T_r).
  ControlInput scale_action(double a_surge, double a_yaw) const;

  // Checks SPD mass matrix, positive geometry and speed. Throws on failure.
  void validate() const;

  // Bundled defaults: a CyberShip II style 1:70 scale supply-ship model.
  static VesselModel default_model();
  static VesselModel from_config_file(const std::string& path);
  static VesselModel from_config_text(const std::string& text);
};

// Basic rotation about the z (down) axis embedding the planar rotation,
// with a unit (3,3) entry acting on the yaw rate.
Eigen::Matrix3d rotation_matrix(double psi);

// Time derivative of [eta; nu] under a (pre-saturated) control input.
Eigen::Matrix<double, 6, 1> state_derivative(const VesselState& state,
                                             const ControlInput& input,
                                             const VesselModel& model);

// Classical fixed-step RK4 integration of the vessel equations of motion.
// Saturates the input, re-wraps psi, and throws SimulationFault if the
// result is non-finite.
VesselState step(const VesselState& state, const ControlInput& input,
                 const VesselModel& model, double dt);

}  // namespace asv
