#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asv/common.hpp"
#include "asv/dynamics.hpp"

namespace asv {

// Circle or simple polygon, static terrain or a moving vessel hull.
struct Obstacle {
  enum class Shape { Circle, Polygon };
  enum class Kind { Static, Dynamic };

  Shape shape = Shape::Circle;
  Kind kind = Kind::Static;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // circles
  double radius = 0.0;
  std::vector<Eigen::Vector2d> vertices;             // polygons, >= 3, simple
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();  // NED m/s, zero if static
  int id = -1;

  static Obstacle make_circle(const Eigen::Vector2d& c, double r, int id = -1,
                              Kind kind = Kind::Static);
  static Obstacle make_polygon(std::vector<Eigen::Vector2d> verts, int id = -1,
                               Kind kind = Kind::Static);
  // Axis of the rectangle along `heading`; used for sensing vessel hulls.
  static Obstacle make_rectangle(const Eigen::Vector2d& c, double heading,
                                 double length, double width, int id,
                                 const Eigen::Vector2d& vel);
  void validate() const;
};

struct SensorConfig {
  int n_rays = 180;
  double max_range = 1500.0;       // m
  int n_sectors = 9;
  double partition_gamma = 13.0;   // sector density shaping
  double angle_step() const { return 2.0 * kPi / n_rays; }
};

// Sigmoid-shaped mapping from ray index to sector index. Rays are ordered by
// body-relative angle from the stern (index 0) through the bow (index N/2)
// and back; the partition is densest around the bow. Construction fails if
// the configured shape parameter does not reach every sector.
class SectorMap {
 public:
  explicit SectorMap(const SensorConfig& cfg);

  int sector(int ray) const { return assignment_[ray]; }
  int sector_count() const { return n_sectors_; }
  int ray_count() const { return static_cast<int>(assignment_.size()); }
  double ray_angle(int ray) const { return ray_angles_[ray]; }
  double center_angle(int k) const { return center_angles_[k]; }
  const std::vector<int>& rays_in(int k) const { return members_[k]; }

 private:
  int n_sectors_;
  std::vector<int> assignment_;
  std::vector<double> ray_angles_;
  std::vector<double> center_angles_;
  std::vector<std::vector<int>> members_;
};

// Distance along a ray to the obstacle boundary; max_range when it misses,
// 0 when the origin is inside the obstacle.
double cast_ray(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir,
                const Obstacle& obstacle, double max_range);

struct RayScan {
  Eigen::VectorXd distances;  // per ray, in (0, max_range] (0 = origin inside)
  std::vector<int> hit;       // index into the obstacle list, -1 for none
};

RayScan cast_rays(const VesselState& state, const std::vector<Obstacle>& obstacles,
                  const SensorConfig& cfg, const SectorMap& sectors);

double pool_min(const Eigen::VectorXd& measurements);
double pool_max(const Eigen::VectorXd& measurements);

// Maximum distance a vessel of width `width` can feasibly travel into the
// sector, given ray spacing `theta`: walks the distance levels in ascending
// order and stops at the first level whose widest opening is narrower than
// the vessel; if every level stays passable, the largest measurement wins.
double pool_feasibility(const Eigen::VectorXd& measurements, double theta, double width);

// Logarithmic distance-to-closeness map, 1 at contact and 0 at max range.
double closeness(double distance, double max_range);

// Expresses a NED velocity in the sector frame whose y axis runs along the
// sector center line toward the vessel (approach gives v_y > 0).
Eigen::Vector2d decompose_velocity(const Eigen::Vector2d& velocity_ned,
                                   double sector_center_angle, double psi);

// One complete sweep: distances, pooled reachable distance, closeness and
// decomposed obstacle velocity per sector, plus the per-ray data the reward
// terms consume.
struct SensorFrame {
  Eigen::VectorXd distances;       // per ray
  std::vector<int> hit;            // per ray obstacle index, -1 none
  std::vector<bool> hit_dynamic;   // per ray
  Eigen::VectorXd ray_angles;      // body-relative
  Eigen::VectorXd ray_approach;    // v_y of the obstacle hit by each ray (0 if none)
  Eigen::VectorXd reach;           // per sector, feasibility pooled
  Eigen::VectorXd sector_closeness;
  Eigen::MatrixXd sector_velocity;  // 2 x D, (v_x, v_y) of closest moving obstacle
  double max_range = 0.0;
};

SensorFrame sense(const VesselState& state, const std::vector<Obstacle>& obstacles,
                  const SensorConfig& cfg, const SectorMap& sectors, double vessel_width);

// [c(w_1), v_x1, v_y1, ..., c(w_D), v_xD, v_yD]
Eigen::VectorXd perception_vector(const SensorFrame& frame);

}  // namespace asv
