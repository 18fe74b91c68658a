#include "asv/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace asv {

Obstacle Obstacle::make_circle(const Eigen::Vector2d& c, double r, int id, Kind kind) {
  Obstacle o;
  o.shape = Shape::Circle;
  o.kind = kind;
  o.center = c;
  o.radius = r;
  o.id = id;
  o.validate();
  return o;
}

Obstacle Obstacle::make_polygon(std::vector<Eigen::Vector2d> verts, int id, Kind kind) {
  Obstacle o;
  o.shape = Shape::Polygon;
  o.kind = kind;
  o.vertices = std::move(verts);
  o.id = id;
  o.validate();
  return o;
}

Obstacle Obstacle::make_rectangle(const Eigen::Vector2d& c, double heading,
                                  double length, double width, int id,
                                  const Eigen::Vector2d& vel) {
  const Eigen::Vector2d fwd(std::cos(heading), std::sin(heading));
  const Eigen::Vector2d side(-std::sin(heading), std::cos(heading));
  const Eigen::Vector2d l = 0.5 * length * fwd;
  const Eigen::Vector2d w = 0.5 * width * side;
  Obstacle o = make_polygon({c + l + w, c + l - w, c - l - w, c - l + w}, id,
                            Kind::Dynamic);
  o.velocity = vel;
  return o;
}

void Obstacle::validate() const {
  if (shape == Shape::Circle) {
    if (!(radius > 0.0)) throw std::invalid_argument("obstacle: circle radius must be positive");
  } else {
    if (vertices.size() < 3)
      throw std::invalid_argument("obstacle: polygon needs at least 3 vertices");
  }
}

SectorMap::SectorMap(const SensorConfig& cfg) : n_sectors_(cfg.n_sectors) {
  if (cfg.n_rays < cfg.n_sectors || cfg.n_sectors < 1)
    throw std::invalid_argument("sensor config: need n_rays >= n_sectors >= 1");
  if (!(cfg.max_range > 0.0))
    throw std::invalid_argument("sensor config: max_range must be positive");

  const int n = cfg.n_rays;
  const int d = cfg.n_sectors;
  const double g = cfg.partition_gamma;
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const double offset = d * sigmoid(-g / 2.0);

  assignment_.resize(n);
  ray_angles_.resize(n);
  members_.assign(d, {});
  for (int i = 0; i < n; ++i) {
    int k = static_cast<int>(std::floor(d * sigmoid(g * i / n - g / 2.0) - offset));
    k = std::clamp(k, 0, d - 1);
    assignment_[i] = k;
    ray_angles_[i] = -kPi + 2.0 * kPi * i / n;
    members_[k].push_back(i);
  }
  for (int k = 0; k < d; ++k) {
    if (members_[k].empty())
      throw std::invalid_argument(
          "sensor config: partition_gamma=" + std::to_string(g) +
          " leaves sector " + std::to_string(k) +
          " empty (mapping not surjective); increase partition_gamma");
  }
  center_angles_.resize(d);
  for (int k = 0; k < d; ++k) {
    double sum = 0.0;
    for (int i : members_[k]) sum += ray_angles_[i];
    center_angles_[k] = sum / members_[k].size();
  }
}

namespace {

double ray_circle(const Eigen::Vector2d& o, const Eigen::Vector2d& d,
                  const Eigen::Vector2d& c, double r, double max_range) {
  const Eigen::Vector2d rel = c - o;
  if (rel.squaredNorm() <= r * r) return 0.0;  // origin inside
  const double along = rel.dot(d);
  if (along < 0.0) return max_range;
  const double disc = along * along - rel.squaredNorm() + r * r;
  if (disc < 0.0) return max_range;
  const double t = along - std::sqrt(disc);
  if (t < 0.0 || t > max_range) return max_range;
  return t;
}

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& v) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double xi = v[j].x() + (v[i].x() - v[j].x()) * (p.y() - v[j].y()) /
                                       (v[i].y() - v[j].y());
      if (p.x() < xi) inside = !inside;
    }
  }
  return inside;
}

double ray_polygon(const Eigen::Vector2d& o, const Eigen::Vector2d& d,
                   const std::vector<Eigen::Vector2d>& v, double max_range) {
  if (point_in_polygon(o, v)) return 0.0;
  double best = max_range;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Eigen::Vector2d e = v[i] - v[j];
    const double denom = d.x() * e.y() - d.y() * e.x();
    if (std::abs(denom) < 1e-15) continue;
    const Eigen::Vector2d rel = v[j] - o;
    const double t = (rel.x() * e.y() - rel.y() * e.x()) / denom;
    const double s = (rel.x() * d.y() - rel.y() * d.x()) / -denom;
    if (t >= 0.0 && s >= 0.0 && s <= 1.0 && t < best) best = t;
  }
  return best;
}

struct Bound {
  Eigen::Vector2d center;
  double radius;
};

Bound bounding_circle(const Obstacle& ob) {
  if (ob.shape == Obstacle::Shape::Circle) return {ob.center, ob.radius};
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : ob.vertices) c += v;
  c /= static_cast<double>(ob.vertices.size());
  double r = 0.0;
  for (const auto& v : ob.vertices) r = std::max(r, (v - c).norm());
  return {c, r};
}

}  // namespace

double cast_ray(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir,
                const Obstacle& obstacle, double max_range) {
  if (obstacle.shape == Obstacle::Shape::Circle)
    return ray_circle(origin, dir, obstacle.center, obstacle.radius, max_range);
  return ray_polygon(origin, dir, obstacle.vertices, max_range);
}

RayScan cast_rays(const VesselState& state, const std::vector<Obstacle>& obstacles,
                  const SensorConfig& cfg, const SectorMap& sectors) {
  const int n = cfg.n_rays;
  RayScan scan;
  scan.distances = Eigen::VectorXd::Constant(n, cfg.max_range);
  scan.hit.assign(n, -1);

  std::vector<Bound> bounds;
  bounds.reserve(obstacles.size());
  for (const auto& ob : obstacles) bounds.push_back(bounding_circle(ob));

  const Eigen::Vector2d origin = state.position();
  for (int i = 0; i < n; ++i) {
    const double a = state.psi + sectors.ray_angle(i);
    const Eigen::Vector2d dir(std::cos(a), std::sin(a));
    for (std::size_t j = 0; j < obstacles.size(); ++j) {
      // bounding-circle reject
      const Eigen::Vector2d rel = bounds[j].center - origin;
      const double along = rel.dot(dir);
      if (along < -bounds[j].radius) continue;
      const double perp2 = rel.squaredNorm() - along * along;
      if (perp2 > bounds[j].radius * bounds[j].radius) continue;

      const double t = cast_ray(origin, dir, obstacles[j], cfg.max_range);
      if (t < scan.distances(i)) {
        scan.distances(i) = t;
        scan.hit[i] = static_cast<int>(j);
      }
    }
  }
  return scan;
}

double pool_min(const Eigen::VectorXd& m) {
  if (m.size() == 0) throw std::invalid_argument("pool_min: empty sector");
  return m.minCoeff();
}

double pool_max(const Eigen::VectorXd& m) {
  if (m.size() == 0) throw std::invalid_argument("pool_max: empty sector");
  return m.maxCoeff();
}

double pool_feasibility(const Eigen::VectorXd& measurements, double theta, double width) {
  const Eigen::Index n = measurements.size();
  if (n == 0) throw std::invalid_argument("pool_feasibility: empty sector");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return measurements(a) < measurements(b); });

  for (int idx : order) {
    const double level = measurements(idx);
    const double arc = theta * level;
    double opening = arc / 2.0;
    bool passable = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (measurements(j) > level) {
        opening += arc;
        if (opening > width) {
          passable = true;
          break;
        }
      } else {
        opening += arc / 2.0;
        if (opening > width) {
          passable = true;
          break;
        }
        opening = 0.0;
      }
    }
    if (!passable) return level;
  }
  // every level admits a wide-enough opening
  return measurements.maxCoeff();
}

double closeness(double distance, double max_range) {
  const double c = 1.0 - std::log(distance + 1.0) / std::log(max_range + 1.0);
  return std::clamp(c, 0.0, 1.0);
}

Eigen::Vector2d decompose_velocity(const Eigen::Vector2d& velocity_ned,
                                   double sector_center_angle, double psi) {
  const double a = psi + sector_center_angle;  // outward along the center line
  const Eigen::Vector2d y_axis(-std::cos(a), -std::sin(a));  // toward the vessel
  const Eigen::Vector2d x_axis(y_axis.y(), -y_axis.x());     // right-handed, z down
  return {velocity_ned.dot(x_axis), velocity_ned.dot(y_axis)};
}

SensorFrame sense(const VesselState& state, const std::vector<Obstacle>& obstacles,
                  const SensorConfig& cfg, const SectorMap& sectors, double vessel_width) {
  const RayScan scan = cast_rays(state, obstacles, cfg, sectors);
  const int n = cfg.n_rays;
  const int d = sectors.sector_count();

  SensorFrame f;
  f.distances = scan.distances;
  f.hit = scan.hit;
  f.hit_dynamic.assign(n, false);
  f.ray_angles.resize(n);
  f.ray_approach = Eigen::VectorXd::Zero(n);
  f.max_range = cfg.max_range;
  for (int i = 0; i < n; ++i) {
    f.ray_angles(i) = sectors.ray_angle(i);
    const int h = scan.hit[i];
    if (h >= 0 && obstacles[h].kind == Obstacle::Kind::Dynamic) {
      f.hit_dynamic[i] = true;
      f.ray_approach(i) = decompose_velocity(obstacles[h].velocity,
                                             sectors.center_angle(sectors.sector(i)),
                                             state.psi)
                              .y();
    }
  }

  f.reach.resize(d);
  f.sector_closeness.resize(d);
  for (int k = 0; k < d; ++k) {
    const auto& rays = sectors.rays_in(k);
    Eigen::VectorXd m(rays.size());
    for (std::size_t j = 0; j < rays.size(); ++j) m(j) = scan.distances(rays[j]);
    f.reach(k) = pool_feasibility(m, cfg.angle_step(), vessel_width);
    f.sector_closeness(k) = closeness(f.reach(k), cfg.max_range);
  }

  // Each moving obstacle belongs to the sector of its nearest hitting ray
  // (ties to the lower sector index); per sector the closest one provides
  // the decomposed velocity.
  f.sector_velocity = Eigen::MatrixXd::Zero(2, d);
  std::vector<double> nearest_dist(obstacles.size(), std::numeric_limits<double>::infinity());
  std::vector<int> nearest_sector(obstacles.size(), -1);
  for (int i = 0; i < n; ++i) {
    const int h = scan.hit[i];
    if (h < 0 || obstacles[h].kind != Obstacle::Kind::Dynamic) continue;
    const int k = sectors.sector(i);
    if (scan.distances(i) < nearest_dist[h] ||
        (scan.distances(i) == nearest_dist[h] && k < nearest_sector[h])) {
      nearest_dist[h] = scan.distances(i);
      nearest_sector[h] = k;
    }
  }
  std::vector<double> best_in_sector(d, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    const int k = nearest_sector[j];
    if (k < 0) continue;
    if (nearest_dist[j] < best_in_sector[k]) {
      best_in_sector[k] = nearest_dist[j];
      f.sector_velocity.col(k) =
          decompose_velocity(obstacles[j].velocity, sectors.center_angle(k), state.psi);
    }
  }
  return f;
}

Eigen::VectorXd perception_vector(const SensorFrame& frame) {
  const int d = static_cast<int>(frame.reach.size());
  Eigen::VectorXd s(3 * d);
  for (int k = 0; k < d; ++k) {
    s(3 * k) = frame.sector_closeness(k);
    s(3 * k + 1) = frame.sector_velocity(0, k);
    s(3 * k + 2) = frame.sector_velocity(1, k);
  }
  return s;
}

}  // namespace asv
