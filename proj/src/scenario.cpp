#include "asv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "asv/guidance.hpp"
#include "json.hpp"

namespace asv {

using nlohmann::json;

Eigen::Vector2d TargetTrack::position(double t) const {
  if (!sampled) return start + velocity * t;
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[i - 1], t1 = times[i];
  const double a = (t - t0) / (t1 - t0);
  return (1.0 - a) * points[i - 1] + a * points[i];
}

Eigen::Vector2d TargetTrack::velocity_at(double t) const {
  if (!sampled) return velocity;
  if (t < times.front() || t >= times.back()) return Eigen::Vector2d::Zero();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  return (points[i] - points[i - 1]) / (times[i] - times[i - 1]);
}

double TargetTrack::heading_at(double t) const {
  const Eigen::Vector2d v = velocity_at(t);
  if (v.norm() < 1e-12) return 0.0;
  return std::atan2(v.y(), v.x());
}

namespace {

bool point_inside(const Obstacle& ob, const Eigen::Vector2d& p) {
  if (ob.shape == Obstacle::Shape::Circle)
    return (p - ob.center).norm() <= ob.radius;
  bool inside = false;
  const auto& v = ob.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double xi =
          v[j].x() + (v[i].x() - v[j].x()) * (p.y() - v[j].y()) / (v[i].y() - v[j].y());
      if (p.x() < xi) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

void Scenario::validate() const {
  if (waypoints.size() < 2)
    throw std::invalid_argument("scenario: need at least 2 path waypoints");
  for (const auto& ob : static_obstacles) ob.validate();
  for (const auto& ob : static_obstacles) {
    if (point_inside(ob, spawn.position()))
      throw std::invalid_argument("scenario: spawn lies inside obstacle id " +
                                  std::to_string(ob.id));
    if (point_inside(ob, waypoints.back()))
      throw std::invalid_argument("scenario: goal lies inside obstacle id " +
                                  std::to_string(ob.id));
  }
  for (const auto& t : targets) {
    if (!(t.length > 0.0) || !(t.width > 0.0))
      throw std::invalid_argument("scenario: target id " + std::to_string(t.id) +
                                  " has non-positive geometry");
    if (t.track.sampled) {
      if (t.track.times.size() != t.track.points.size() || t.track.times.size() < 2)
        throw std::invalid_argument("scenario: target id " + std::to_string(t.id) +
                                    " has a malformed sampled track");
      for (std::size_t i = 1; i < t.track.times.size(); ++i)
        if (!(t.track.times[i] > t.track.times[i - 1]))
          throw std::invalid_argument("scenario: target id " + std::to_string(t.id) +
                                      " track times must be strictly increasing");
    }
  }
  if (!(goal_radius >= 0.0)) throw std::invalid_argument("scenario: goal_radius must be >= 0");
  if (max_steps <= 0) throw std::invalid_argument("scenario: max_steps must be positive");
  if (has_bounds) {
    auto inside_bounds = [&](const Eigen::Vector2d& p) {
      return p.x() >= bounds_min.x() && p.x() <= bounds_max.x() &&
             p.y() >= bounds_min.y() && p.y() <= bounds_max.y();
    };
    if (!inside_bounds(waypoints.front()) || !inside_bounds(waypoints.back()))
      throw std::invalid_argument("scenario: path endpoints must lie inside world bounds");
  }
}

namespace {

json vec2(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

Eigen::Vector2d vec2_from(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json obstacle_to_json(const Obstacle& ob) {
  json j;
  j["id"] = ob.id;
  if (ob.shape == Obstacle::Shape::Circle) {
    j["type"] = "circle";
    j["center"] = vec2(ob.center);
    j["radius"] = ob.radius;
  } else {
    j["type"] = "polygon";
    json verts = json::array();
    for (const auto& v : ob.vertices) verts.push_back(vec2(v));
    j["vertices"] = verts;
  }
  return j;
}

Obstacle obstacle_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const int id = j.value("id", -1);
  if (type == "circle")
    return Obstacle::make_circle(vec2_from(j.at("center")), j.at("radius").get<double>(), id);
  if (type == "polygon") {
    std::vector<Eigen::Vector2d> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(vec2_from(v));
    return Obstacle::make_polygon(std::move(verts), id);
  }
  throw std::invalid_argument("scenario: unknown obstacle type '" + type + "'");
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["format"] = "asv-scenario-v1";
  j["seed"] = s.seed;
  j["path"] = {{"waypoints", json::array()}, {"fillet_radius", s.fillet_radius}};
  for (const auto& w : s.waypoints) j["path"]["waypoints"].push_back(vec2(w));
  j["spawn"] = {{"x", s.spawn.x}, {"y", s.spawn.y}, {"psi", s.spawn.psi},
                {"u", s.spawn.u}, {"v", s.spawn.v}, {"r", s.spawn.r}};
  j["spawn_jitter"] = {{"lateral", s.spawn_jitter_lateral},
                       {"along", s.spawn_jitter_along},
                       {"heading", s.spawn_jitter_heading}};
  j["goal_radius"] = s.goal_radius;
  j["max_steps"] = s.max_steps;
  if (s.has_bounds)
    j["world_bounds"] = {{"min", vec2(s.bounds_min)}, {"max", vec2(s.bounds_max)}};
  j["static_obstacles"] = json::array();
  for (const auto& ob : s.static_obstacles) j["static_obstacles"].push_back(obstacle_to_json(ob));
  j["targets"] = json::array();
  for (const auto& t : s.targets) {
    json tj;
    tj["id"] = t.id;
    tj["length"] = t.length;
    tj["width"] = t.width;
    if (t.track.sampled) {
      tj["track"]["type"] = "sampled";
      tj["track"]["times"] = t.track.times;
      json pts = json::array();
      for (const auto& p : t.track.points) pts.push_back(vec2(p));
      tj["track"]["points"] = pts;
    } else {
      tj["track"]["type"] = "linear";
      tj["track"]["start"] = vec2(t.track.start);
      tj["track"]["velocity"] = vec2(t.track.velocity);
    }
    j["targets"].push_back(tj);
  }
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "asv-scenario-v1")
    throw std::invalid_argument("scenario: missing or unsupported format tag");
  Scenario s;
  s.seed = j.value("seed", 0ULL);
  for (const auto& w : j.at("path").at("waypoints")) s.waypoints.push_back(vec2_from(w));
  s.fillet_radius = j.at("path").value("fillet_radius", 0.0);
  const json& sp = j.at("spawn");
  s.spawn.x = sp.at("x");
  s.spawn.y = sp.at("y");
  s.spawn.psi = sp.at("psi");
  s.spawn.u = sp.value("u", 0.0);
  s.spawn.v = sp.value("v", 0.0);
  s.spawn.r = sp.value("r", 0.0);
  if (j.contains("spawn_jitter")) {
    s.spawn_jitter_lateral = j["spawn_jitter"].value("lateral", 0.0);
    s.spawn_jitter_along = j["spawn_jitter"].value("along", 0.0);
    s.spawn_jitter_heading = j["spawn_jitter"].value("heading", 0.0);
  }
  s.goal_radius = j.value("goal_radius", 100.0);
  s.max_steps = j.value("max_steps", 10000);
  if (j.contains("world_bounds")) {
    s.has_bounds = true;
    s.bounds_min = vec2_from(j["world_bounds"].at("min"));
    s.bounds_max = vec2_from(j["world_bounds"].at("max"));
  }
  if (j.contains("static_obstacles"))
    for (const auto& ob : j["static_obstacles"]) s.static_obstacles.push_back(obstacle_from_json(ob));
  if (j.contains("targets")) {
    for (const auto& tj : j["targets"]) {
      TargetVessel t;
      t.id = tj.value("id", 0);
      t.length = tj.at("length");
      t.width = tj.at("width");
      const json& tr = tj.at("track");
      if (tr.at("type") == "sampled") {
        t.track.sampled = true;
        t.track.times = tr.at("times").get<std::vector<double>>();
        for (const auto& p : tr.at("points")) t.track.points.push_back(vec2_from(p));
      } else {
        t.track.sampled = false;
        t.track.start = vec2_from(tr.at("start"));
        t.track.velocity = vec2_from(tr.at("velocity"));
      }
      s.targets.push_back(std::move(t));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("scenario: cannot write '" + path + "'");
  out << scenario_to_json(s) << "\n";
}

Scenario generate_training_scenario(std::uint64_t seed, const ScenarioGenParams& p) {
  Rng rng(seed);
  Scenario s;
  s.seed = seed;
  s.goal_radius = p.goal_radius;
  s.max_steps = p.max_steps;
  s.fillet_radius = p.fillet_radius;

  // meandering waypoint chain of roughly the requested length
  const double total = rng.uniform(p.path_min_length, p.path_max_length);
  double heading = rng.uniform(-kPi, kPi);
  Eigen::Vector2d cursor(0.0, 0.0);
  s.waypoints.push_back(cursor);
  double built = 0.0;
  while (built < total) {
    const double seg = std::min(rng.uniform(total / 8.0, total / 4.0), total - built + 1.0);
    cursor += seg * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    s.waypoints.push_back(cursor);
    built += seg;
    heading += rng.uniform(-p.segment_turn_max, p.segment_turn_max);
  }

  const PathSpec path = PathSpec::from_waypoints(s.waypoints, s.fillet_radius);
  const Eigen::Vector2d spawn_pos = path.position(0.0);
  const Eigen::Vector2d goal_pos = path.position(path.length());

  s.spawn.x = spawn_pos.x();
  s.spawn.y = spawn_pos.y();
  s.spawn.psi = path.path_angle(0.0);

  const int n_static = rng.uniform_int(p.min_static, p.max_static);
  for (int i = 0; i < n_static; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const double w = rng.uniform(0.05, 0.95) * path.length();
      const double radius = rng.uniform(p.static_min_radius, p.static_max_radius);
      const double off = rng.uniform(-p.static_lateral_spread, p.static_lateral_spread);
      const Eigen::Vector2d tangent = path.tangent(w);
      const Eigen::Vector2d normal(-tangent.y(), tangent.x());
      const Eigen::Vector2d center = path.position(w) + off * normal;
      if ((center - spawn_pos).norm() < radius + p.spawn_clearance) continue;
      if ((center - goal_pos).norm() < radius + p.spawn_clearance) continue;
      s.static_obstacles.push_back(
          Obstacle::make_circle(center, radius, static_cast<int>(s.static_obstacles.size())));
      placed = true;
    }
    if (!placed)
      throw std::runtime_error("scenario generator: failed to place obstacle after 100 attempts");
  }

  const int n_targets = rng.uniform_int(p.min_targets, p.max_targets);
  for (int i = 0; i < n_targets; ++i) {
    TargetVessel t;
    t.id = i;
    t.length = rng.uniform(p.target_min_length, p.target_max_length);
    t.width = t.length / 5.0;
    const double w = rng.uniform(0.15, 0.9) * path.length();
    const double speed = rng.uniform(p.target_min_speed, p.target_max_speed);
    const double course = rng.uniform(-kPi, kPi);
    const double lead_time = rng.uniform(50.0, 400.0);
    const Eigen::Vector2d meet = path.position(w);
    t.track.velocity = speed * Eigen::Vector2d(std::cos(course), std::sin(course));
    t.track.start = meet - t.track.velocity * lead_time;
    // keep the spawn area clear at t=0
    if ((t.track.start - spawn_pos).norm() < p.spawn_clearance + t.length) {
      t.track.start += 4.0 * p.spawn_clearance * Eigen::Vector2d(std::cos(course + kPi / 2),
                                                                 std::sin(course + kPi / 2));
    }
    s.targets.push_back(std::move(t));
  }

  s.validate();
  return s;
}

Encounter classify_encounter(const VesselState& own, const VesselState& target,
                             const EncounterParams& p) {
  const Eigen::Vector2d rel = target.position() - own.position();
  const double dist = rel.norm();
  if (dist > p.range || dist < 1e-9) return Encounter::None;

  const double bearing = wrap_angle(std::atan2(rel.y(), rel.x()) - own.psi);
  const double reciprocal = wrap_angle(target.psi - own.psi - kPi);
  if (std::abs(bearing) <= p.head_on_bearing &&
      std::abs(reciprocal) <= p.head_on_reciprocal_tol)
    return Encounter::HeadOn;

  const double bearing_from_target = wrap_angle(std::atan2(-rel.y(), -rel.x()) - target.psi);
  const double own_speed = std::hypot(own.u, own.v);
  const double target_speed = std::hypot(target.u, target.v);
  if (std::abs(bearing_from_target) > p.stern_boundary && own_speed > target_speed)
    return Encounter::Overtaking;

  const double course_diff = std::abs(wrap_angle(target.psi - own.psi));
  if (course_diff < p.crossing_course_min || course_diff > kPi - p.crossing_course_min)
    return Encounter::None;
  if (bearing >= 0.0 && bearing < p.stern_boundary) return Encounter::CrossingFromStarboard;
  if (bearing < 0.0 && bearing > -p.stern_boundary) return Encounter::CrossingFromPort;
  return Encounter::None;
}

const char* encounter_name(Encounter e) {
  switch (e) {
    case Encounter::HeadOn: return "head-on";
    case Encounter::CrossingFromStarboard: return "crossing-from-starboard";
    case Encounter::CrossingFromPort: return "crossing-from-port";
    case Encounter::Overtaking: return "overtaking";
    default: return "none";
  }
}

}  // namespace asv
