#pragma once

#include "asv/guidance.hpp"
#include "asv/sensing.hpp"

namespace asv {

// Reward shaping parameters. Defaults are the published configuration; the
// velocity/distance scalings for the starboard, port and stern sectors must
// keep the starboard distance decay the slowest.
struct RewardConfig {
  double gamma_cte = 0.5;          // cross-track error scaling (1/m)
  double gamma_r = 0.1;            // constant multiplier in the path reward
  double alpha_x = 75.0;           // raw collision-avoidance penalty scaling
  double gamma_theta_stat = 10.0;  // sensor angle scaling, static
  double gamma_theta_dyn = 1.0;    // sensor angle scaling, dynamic
  double gamma_x_stat = 0.01;      // static obstacle distance scaling (1/m)

  // zeta_v: scaling of the approach speed, per sector and sign of v_y
  double gamma_v_starboard_pos = 0.004;
  double gamma_v_starboard_neg = 0.05;
  double gamma_v_port_pos = 0.007;
  double gamma_v_port_neg = 0.005;
  double gamma_v_stern_pos = 0.007;
  double gamma_v_stern_neg = 0.005;

  // zeta_x: dynamic obstacle distance scaling per sector (1/m)
  double gamma_x_starboard = 0.007;
  double gamma_x_port = 0.009;
  double gamma_x_stern = 0.01;

  // lambda blending of the two objectives
  double alpha_lambda_pos = 4.0;
  double alpha_lambda_neg = 2.0;
  double gamma_lambda_pos = 0.003;  // 1/m
  double gamma_lambda_neg = 0.005;  // 1/m

  double collision_reward = -10000.0;
  double living_penalty = -1.0;

  void validate() const;
};

enum class ColregsSector { Starboard, Port, Stern };

// Starboard for [0, 112.5) deg, port for [-112.5, 0) deg, stern otherwise.
ColregsSector colregs_sector(double theta);

// (u/U_max cos(psi_err) + gamma_r)(exp(-gamma_cte |eps|) + gamma_r) - gamma_r^2
double path_reward(const NavFeatures& nav, const RewardConfig& cfg, double max_speed);

// Single-ray static penalty, <= 0.
double static_penalty(double distance, double theta, const RewardConfig& cfg);

// Weighted average of the raw static penalties over all rays; rays that hit
// moving obstacles enter at max range (they are charged by the dynamic term).
double static_colav_reward(const SensorFrame& frame, const RewardConfig& cfg);

// Single-ray dynamic penalty, <= 0. The exponent is clamped to [-50, 50].
double dynamic_penalty(double distance, double theta, double v_y, const RewardConfig& cfg);

// Objective blending weight in (0, 1), increasing with distance.
double lambda_weight(double distance, double v_y, const RewardConfig& cfg);

struct DynamicColavResult {
  double reward = 0.0;
  double lambda_min = 1.0;  // min over rays
};

// Weighted average of dynamic penalties (scaled by 1 - lambda_i per ray) and
// the minimum lambda_i, which regulates the path term.
DynamicColavResult dynamic_colav_reward(const SensorFrame& frame, const RewardConfig& cfg);

struct RewardBreakdown {
  double total = 0.0;
  double path = 0.0;
  double colav_static = 0.0;
  double colav_dynamic = 0.0;
  double lambda_min = 1.0;
  bool collided = false;
};

// collision_reward on collision, else lambda_min * r_path + r_colav + r_exists.
RewardBreakdown total_reward(const NavFeatures& nav, const SensorFrame& frame,
                             bool collided, const RewardConfig& cfg, double max_speed);

}  // namespace asv
