#include "asv/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace asv {

namespace {
constexpr double kSectorBoundary = deg2rad(112.5);
}

void RewardConfig::validate() const {
  if (!(gamma_x_starboard < gamma_x_port && gamma_x_port <= gamma_x_stern))
    throw std::invalid_argument(
        "reward config: distance scalings must satisfy starboard < port <= stern");
  if (!(collision_reward < 0.0))
    throw std::invalid_argument("reward config: collision reward must be negative");
  if (!(living_penalty < 0.0))
    throw std::invalid_argument("reward config: living penalty must be negative");
}

ColregsSector colregs_sector(double theta) {
  if (theta >= 0.0 && theta < kSectorBoundary) return ColregsSector::Starboard;
  if (theta >= -kSectorBoundary && theta < 0.0) return ColregsSector::Port;
  return ColregsSector::Stern;
}

double path_reward(const NavFeatures& nav, const RewardConfig& cfg, double max_speed) {
  const double velocity_term = nav.surge / max_speed * std::cos(nav.heading_err) + cfg.gamma_r;
  const double cte_term = std::exp(-cfg.gamma_cte * std::abs(nav.cross_track)) + cfg.gamma_r;
  return velocity_term * cte_term - cfg.gamma_r * cfg.gamma_r;
}

double static_penalty(double distance, double theta, const RewardConfig& cfg) {
  const double weight = 1.0 / (1.0 + cfg.gamma_theta_stat * std::abs(theta));
  return -weight * cfg.alpha_x * std::exp(-cfg.gamma_x_stat * distance);
}

double static_colav_reward(const SensorFrame& frame, const RewardConfig& cfg) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < frame.distances.size(); ++i) {
    const double x = frame.hit_dynamic[i] ? frame.max_range : frame.distances(i);
    const double w = 1.0 / (1.0 + cfg.gamma_theta_stat * std::abs(frame.ray_angles(i)));
    num += w * cfg.alpha_x * std::exp(-cfg.gamma_x_stat * x);
    den += w;
  }
  return -num / den;
}

namespace {

double zeta_x(ColregsSector s, const RewardConfig& cfg) {
  switch (s) {
    case ColregsSector::Starboard: return cfg.gamma_x_starboard;
    case ColregsSector::Port: return cfg.gamma_x_port;
    default: return cfg.gamma_x_stern;
  }
}

double zeta_v(ColregsSector s, double v_y, const RewardConfig& cfg) {
  switch (s) {
    case ColregsSector::Starboard:
      return v_y >= 0.0 ? cfg.gamma_v_starboard_pos : cfg.gamma_v_starboard_neg;
    case ColregsSector::Port:
      return v_y >= 0.0 ? cfg.gamma_v_port_pos : cfg.gamma_v_port_neg;
    default:
      return v_y >= 0.0 ? cfg.gamma_v_stern_pos : cfg.gamma_v_stern_neg;
  }
}

double raw_dynamic_penalty(double distance, double theta, double v_y,
                           const RewardConfig& cfg) {
  const ColregsSector s = colregs_sector(theta);
  const double exponent =
      std::clamp((zeta_v(s, v_y, cfg) * v_y - zeta_x(s, cfg)) * distance, -50.0, 50.0);
  return cfg.alpha_x * std::exp(exponent);
}

}  // namespace

double dynamic_penalty(double distance, double theta, double v_y, const RewardConfig& cfg) {
  const double weight =
      1.0 / (1.0 + std::exp(std::clamp(cfg.gamma_theta_dyn * std::abs(theta), -50.0, 50.0)));
  return -weight * raw_dynamic_penalty(distance, theta, v_y, cfg);
}

double lambda_weight(double distance, double v_y, const RewardConfig& cfg) {
  const double gamma = v_y >= 0.0 ? cfg.gamma_lambda_pos : cfg.gamma_lambda_neg;
  const double alpha = v_y >= 0.0 ? cfg.alpha_lambda_pos : cfg.alpha_lambda_neg;
  return 1.0 / (1.0 + std::exp(std::clamp(-gamma * distance + alpha, -50.0, 50.0)));
}

DynamicColavResult dynamic_colav_reward(const SensorFrame& frame, const RewardConfig& cfg) {
  DynamicColavResult res;
  double num = 0.0, den = 0.0;
  double lambda_min = 1.0;
  for (Eigen::Index i = 0; i < frame.distances.size(); ++i) {
    const bool dyn = frame.hit_dynamic[i];
    const double x = dyn ? frame.distances(i) : frame.max_range;
    const double v_y = dyn ? frame.ray_approach(i) : 0.0;
    const double theta = frame.ray_angles(i);
    const double lambda = lambda_weight(x, v_y, cfg);
    lambda_min = std::min(lambda_min, lambda);
    const double w =
        1.0 / (1.0 + std::exp(std::clamp(cfg.gamma_theta_dyn * std::abs(theta), -50.0, 50.0)));
    num += w * (1.0 - lambda) * raw_dynamic_penalty(x, theta, v_y, cfg);
    den += w;
  }
  res.reward = -num / den;
  res.lambda_min = lambda_min;
  return res;
}

RewardBreakdown total_reward(const NavFeatures& nav, const SensorFrame& frame,
                             bool collided, const RewardConfig& cfg, double max_speed) {
  RewardBreakdown b;
  b.collided = collided;
  if (collided) {
    b.total = cfg.collision_reward;
    return b;
  }
  b.path = path_reward(nav, cfg, max_speed);
  b.colav_static = static_colav_reward(frame, cfg);
  const DynamicColavResult dyn = dynamic_colav_reward(frame, cfg);
  b.colav_dynamic = dyn.reward;
  b.lambda_min = dyn.lambda_min;
  b.total = b.lambda_min * b.path + b.colav_static + b.colav_dynamic + cfg.living_penalty;
  return b;
}

}  // namespace asv
