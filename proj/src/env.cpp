#include "asv/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asv {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Collision: return "collision";
    case Termination::Goal: return "goal";
    case Termination::Timeout: return "timeout";
    case Termination::LeftWorld: return "left-world";
    default: return "none";
  }
}

namespace {

bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool point_in_poly(const std::vector<Eigen::Vector2d>& v, const Eigen::Vector2d& p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double xi =
          v[j].x() + (v[i].x() - v[j].x()) * (p.y() - v[j].y()) / (v[i].y() - v[j].y());
      if (p.x() < xi) inside = !inside;
    }
  }
  return inside;
}

bool poly_poly_overlap(const std::vector<Eigen::Vector2d>& a,
                       const std::vector<Eigen::Vector2d>& b) {
  if (point_in_poly(b, a[0]) || point_in_poly(a, b[0])) return true;
  for (std::size_t i = 0, j = a.size() - 1; i < a.size(); j = i++)
    for (std::size_t k = 0, l = b.size() - 1; k < b.size(); l = k++)
      if (segments_intersect(a[j], a[i], b[l], b[k])) return true;
  return false;
}

bool poly_circle_overlap(const std::vector<Eigen::Vector2d>& poly,
                         const Eigen::Vector2d& c, double r) {
  if (point_in_poly(poly, c)) return true;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Eigen::Vector2d e = poly[i] - poly[j];
    const double len2 = e.squaredNorm();
    double t = len2 > 0.0 ? (c - poly[j]).dot(e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if ((poly[j] + t * e - c).squaredNorm() <= r * r) return true;
  }
  return false;
}

std::vector<Eigen::Vector2d> hull_polygon(const VesselState& s, double length, double width) {
  const Eigen::Vector2d fwd(std::cos(s.psi), std::sin(s.psi));
  const Eigen::Vector2d side(-std::sin(s.psi), std::cos(s.psi));
  const Eigen::Vector2d l = 0.5 * length * fwd;
  const Eigen::Vector2d w = 0.5 * width * side;
  const Eigen::Vector2d c = s.position();
  return {c + l + w, c + l - w, c - l - w, c - l + w};
}

}  // namespace

Environment::Environment(EnvParams params, Scenario scenario)
    : params_(std::move(params)),
      scenario_(std::move(scenario)),
      path_(PathSpec::from_waypoints(scenario_.waypoints, scenario_.fillet_radius)),
      sectors_(params_.sensor) {
  scenario_.validate();
  params_.reward.validate();
  if (scenario_.has_bounds) {
    bounds_min_ = scenario_.bounds_min;
    bounds_max_ = scenario_.bounds_max;
  } else {
    Eigen::Vector2d lo = scenario_.waypoints.front(), hi = scenario_.waypoints.front();
    for (const auto& w : scenario_.waypoints) {
      lo = lo.cwiseMin(w);
      hi = hi.cwiseMax(w);
    }
    const double margin = std::max(2.0 * params_.sensor.max_range, 1000.0);
    bounds_min_ = lo - Eigen::Vector2d(margin, margin);
    bounds_max_ = hi + Eigen::Vector2d(margin, margin);
  }
}

std::vector<Obstacle> Environment::obstacle_snapshot() const {
  std::vector<Obstacle> obstacles = scenario_.static_obstacles;
  for (const auto& t : scenario_.targets) {
    const Eigen::Vector2d pos = t.track.position(time_);
    const Eigen::Vector2d vel = t.track.velocity_at(time_);
    const double heading = t.track.heading_at(time_);
    obstacles.push_back(
        Obstacle::make_rectangle(pos, heading, t.length, t.width, 1000 + t.id, vel));
  }
  return obstacles;
}

std::vector<VesselState> Environment::target_states() const {
  std::vector<VesselState> out;
  for (const auto& t : scenario_.targets) {
    VesselState s;
    const Eigen::Vector2d pos = t.track.position(time_);
    const Eigen::Vector2d vel = t.track.velocity_at(time_);
    s.x = pos.x();
    s.y = pos.y();
    s.psi = t.track.heading_at(time_);
    s.u = vel.norm();
    out.push_back(s);
  }
  return out;
}

Eigen::VectorXd Environment::observe() {
  const NavFeatures nav = nav_features(path_, vessel_, omega_, params_.lookahead);
  const SensorFrame frame =
      sense(vessel_, obstacle_snapshot(), params_.sensor, sectors_, params_.model.width);
  Eigen::VectorXd obs(obs_dim());
  obs << nav.surge, nav.sway, nav.yaw_rate, nav.cross_track, nav.heading_err,
      nav.heading_err_la, perception_vector(frame);
  return obs;
}

Eigen::VectorXd Environment::reset() {
  vessel_ = scenario_.spawn;
  time_ = 0.0;
  steps_ = 0;
  done_ = false;
  omega_ = project_onto_path(path_, vessel_.position(), 0.0).omega;
  return observe();
}

Eigen::VectorXd Environment::reset(Rng& rng) {
  const bool jittered = scenario_.spawn_jitter_lateral > 0.0 ||
                        scenario_.spawn_jitter_along > 0.0 ||
                        scenario_.spawn_jitter_heading > 0.0;
  if (!jittered) return reset();

  const VesselState base = scenario_.spawn;
  for (int attempt = 0; attempt < 100; ++attempt) {
    VesselState s = base;
    const double lat = rng.uniform(-scenario_.spawn_jitter_lateral, scenario_.spawn_jitter_lateral);
    const double along = rng.uniform(-scenario_.spawn_jitter_along, scenario_.spawn_jitter_along);
    s.x += along * std::cos(base.psi) - lat * std::sin(base.psi);
    s.y += along * std::sin(base.psi) + lat * std::cos(base.psi);
    s.psi = wrap_angle(base.psi +
                       rng.uniform(-scenario_.spawn_jitter_heading, scenario_.spawn_jitter_heading));

    const auto hull = hull_polygon(s, params_.model.length, params_.model.width);
    bool clear = true;
    for (const auto& ob : obstacle_snapshot()) {
      const bool overlap = ob.shape == Obstacle::Shape::Circle
                               ? poly_circle_overlap(hull, ob.center, ob.radius)
                               : poly_poly_overlap(hull, ob.vertices);
      if (overlap) {
        clear = false;
        break;
      }
    }
    if (clear) {
      vessel_ = s;
      time_ = 0.0;
      steps_ = 0;
      done_ = false;
      omega_ = project_onto_path(path_, vessel_.position(), 0.0).omega;
      return observe();
    }
  }
  throw std::runtime_error("environment reset: no collision-free spawn after 100 attempts");
}

bool Environment::check_collision(const SensorFrame& frame,
                                  const std::vector<Obstacle>& obstacles) const {
  if (frame.distances.minCoeff() <= params_.collision_distance) return true;
  const auto hull = hull_polygon(vessel_, params_.model.length, params_.model.width);
  for (const auto& ob : obstacles) {
    const bool overlap = ob.shape == Obstacle::Shape::Circle
                             ? poly_circle_overlap(hull, ob.center, ob.radius)
                             : poly_poly_overlap(hull, ob.vertices);
    if (overlap) return true;
  }
  return false;
}

StepResult Environment::step(const Eigen::Vector2d& action) {
  if (done_) throw std::logic_error("environment: step() called on a finished episode");

  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  const ControlInput input = params_.model.scale_action(a.x(), a.y());
  vessel_ = asv::step(vessel_, input, params_.model, params_.dt);
  ++steps_;
  time_ = steps_ * params_.dt;  // keeps target tracks exactly linear in t

  const std::vector<Obstacle> obstacles = obstacle_snapshot();
  const SensorFrame frame =
      sense(vessel_, obstacles, params_.sensor, sectors_, params_.model.width);
  const NavFeatures nav = nav_features(path_, vessel_, omega_, params_.lookahead);
  omega_ = nav.omega;

  const bool collided = check_collision(frame, obstacles);
  const RewardBreakdown rewards =
      total_reward(nav, frame, collided, params_.reward, params_.model.max_speed);

  StepResult res;
  res.nav = nav;
  res.rewards = rewards;
  res.reward = rewards.total;
  if (collided) {
    res.cause = Termination::Collision;
  } else if (omega_ >= path_.length() - scenario_.goal_radius) {
    res.cause = Termination::Goal;
  } else if (steps_ >= scenario_.max_steps) {
    res.cause = Termination::Timeout;
  } else if (vessel_.x < bounds_min_.x() || vessel_.x > bounds_max_.x() ||
             vessel_.y < bounds_min_.y() || vessel_.y > bounds_max_.y()) {
    res.cause = Termination::LeftWorld;
  }
  res.done = res.cause != Termination::None;
  done_ = res.done;

  Eigen::VectorXd obs(obs_dim());
  obs << nav.surge, nav.sway, nav.yaw_rate, nav.cross_track, nav.heading_err,
      nav.heading_err_la, perception_vector(frame);
  res.observation = std::move(obs);
  return res;
}

Environment::Continuation Environment::save_continuation() const {
  return {vessel_, time_, omega_, steps_, done_};
}

void Environment::restore_continuation(const Continuation& c) {
  vessel_ = c.vessel;
  time_ = c.time;
  omega_ = c.omega;
  steps_ = c.steps;
  done_ = c.done;
}

}  // namespace asv
