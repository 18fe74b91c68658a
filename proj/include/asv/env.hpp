#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "asv/guidance.hpp"
#include "asv/rewards.hpp"
#include "asv/scenario.hpp"

namespace asv {

struct EnvParams {
  double dt = 0.1;
  double lookahead = 3000.0;
  // Any ray reading at or below this distance counts as a collision, in
  // addition to the exact hull-overlap test.
  double collision_distance = 0.0;
  SensorConfig sensor;
  RewardConfig reward;
  VesselModel model = VesselModel::default_model();

  EnvParams() { collision_distance = 0.5 * model.length; }
};

enum class Termination { None, Collision, Goal, Timeout, LeftWorld };

const char* termination_name(Termination t);

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool done = false;
  Termination cause = Termination::None;
  NavFeatures nav;
  RewardBreakdown rewards;
};

// Episodic environment: own-ship dynamics under normalized (surge, yaw)
// actions, target vessels on fixed tracks, ray sensing and the shaped
// reward. Deterministic given (scenario, spawn jitter draws, actions).
class Environment {
 public:
  Environment(EnvParams params, Scenario scenario);

  // Spawn jitter drawn from rng (no-op when the scenario is fixed-spawn).
  Eigen::VectorXd reset(Rng& rng);
  Eigen::VectorXd reset();

  StepResult step(const Eigen::Vector2d& action);

  int obs_dim() const { return 6 + 3 * params_.sensor.n_sectors; }
  bool done() const { return done_; }
  double time() const { return time_; }
  int steps() const { return steps_; }
  const VesselState& vessel() const { return vessel_; }
  const Scenario& scenario() const { return scenario_; }
  const PathSpec& path() const { return path_; }
  const EnvParams& params() const { return params_; }
  // Positions of the target vessels at the current sim time.
  std::vector<VesselState> target_states() const;

  // Enough state to continue a paused episode after a checkpoint reload.
  struct Continuation {
    VesselState vessel;
    double time = 0.0;
    double omega = 0.0;
    int steps = 0;
    bool done = true;
  };
  Continuation save_continuation() const;
  void restore_continuation(const Continuation& c);

 private:
  Eigen::VectorXd observe();
  std::vector<Obstacle> obstacle_snapshot() const;
  bool check_collision(const SensorFrame& frame,
                       const std::vector<Obstacle>& obstacles) const;

  EnvParams params_;
  Scenario scenario_;
  PathSpec path_;
  SectorMap sectors_;
  Eigen::Vector2d bounds_min_, bounds_max_;
  VesselState vessel_;
  double time_ = 0.0;
  double omega_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace asv
