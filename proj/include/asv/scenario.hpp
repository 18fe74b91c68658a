#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "asv/common.hpp"
#include "asv/dynamics.hpp"
#include "asv/sensing.hpp"

namespace asv {

// Target vessel motion: either an exact straight line (training scenarios)
// or a piecewise-linear replay of recorded samples.
struct TargetTrack {
  bool sampled = false;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  std::vector<double> times;                // strictly increasing, sampled only
  std::vector<Eigen::Vector2d> points;

  Eigen::Vector2d position(double t) const;
  Eigen::Vector2d velocity_at(double t) const;
  double heading_at(double t) const;
};

struct TargetVessel {
  TargetTrack track;
  double length = 30.0;
  double width = 6.0;
  int id = 0;
};

// One fully specified episode setup; serializable so runs can be replayed.
struct Scenario {
  std::vector<Eigen::Vector2d> waypoints;
  double fillet_radius = 0.0;
  std::vector<Obstacle> static_obstacles;
  std::vector<TargetVessel> targets;
  VesselState spawn;
  // Spawn distribution half-widths; all zero means a fixed spawn pose.
  double spawn_jitter_lateral = 0.0;
  double spawn_jitter_along = 0.0;
  double spawn_jitter_heading = 0.0;
  double goal_radius = 100.0;
  int max_steps = 10000;
  std::uint64_t seed = 0;
  bool has_bounds = false;
  Eigen::Vector2d bounds_min = Eigen::Vector2d::Zero();
  Eigen::Vector2d bounds_max = Eigen::Vector2d::Zero();

  // Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// Ranges for the stochastic training scenario generator.
struct ScenarioGenParams {
  double path_min_length = 5000.0;
  double path_max_length = 12000.0;
  double segment_turn_max = deg2rad(45.0);
  double fillet_radius = 500.0;
  int min_static = 5;
  int max_static = 25;
  double static_min_radius = 50.0;
  double static_max_radius = 400.0;
  double static_lateral_spread = 1200.0;
  double spawn_clearance = 150.0;
  int min_targets = 2;
  int max_targets = 8;
  double target_min_speed = 1.0;
  double target_max_speed = 6.0;
  double target_min_length = 20.0;
  double target_max_length = 80.0;
  double goal_radius = 100.0;
  int max_steps = 10000;
};

// Random smooth path, circles scattered near it, target vessels on straight
// tracks crossing it. Fully determined by the seed.
Scenario generate_training_scenario(std::uint64_t seed, const ScenarioGenParams& p = {});

enum class Encounter { None, HeadOn, CrossingFromStarboard, CrossingFromPort, Overtaking };

struct EncounterParams {
  double range = 2000.0;
  double head_on_bearing = deg2rad(22.5);
  double head_on_reciprocal_tol = deg2rad(10.0);
  double stern_boundary = deg2rad(112.5);
  double crossing_course_min = deg2rad(10.0);  // courses closer to parallel are not crossings
};

Encounter classify_encounter(const VesselState& own, const VesselState& target,
                             const EncounterParams& p = {});

const char* encounter_name(Encounter e);

}  // namespace asv
