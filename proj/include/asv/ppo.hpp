#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "asv/env.hpp"
#include "asv/mlp.hpp"

namespace asv {

// Gaussian policy (state-independent log standard deviation) and value
// network, both two hidden tanh layers by default.
struct PolicyParams {
  Mlp policy;
  Eigen::VectorXd log_std;
  Mlp value;

  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  static PolicyParams make(int obs_dim, int act_dim, const std::vector<int>& hidden,
                           double log_std_init, Rng& rng);

  int obs_dim() const { return policy.input_dim(); }
  int act_dim() const { return policy.output_dim(); }
  void clamp_log_std();

  int param_count() const;
  Eigen::VectorXd to_flat() const;
  void from_flat(const Eigen::VectorXd& flat);
};

struct PpoConfig {
  double gamma = 0.999;
  int horizon = 1024;        // T, steps per actor per iteration
  int n_actors = 8;
  int epochs = 10;           // passes over the batch per iteration
  long long total_env_steps = 1000000;  // training budget, environment steps
  double learning_rate = 0.0002;
  int minibatches = 32;
  double gae_lambda = 0.95;
  double vf_coef = 0.5;
  double ent_coef = 0.01;
  double clip = 0.2;
  bool normalize_advantages = true;
  bool normalize_observations = true;
  double log_std_init = -0.5;
  std::vector<int> hidden = {64, 64};
  int checkpoint_every = 10;  // iterations

  int iterations() const {
    const long long per_iter = static_cast<long long>(horizon) * n_actors;
    return static_cast<int>((total_env_steps + per_iter - 1) / per_iter);
  }
  void validate() const;
};

// Per-feature running mean/std used to whiten observations; frozen copies
// are taken per iteration and at evaluation time.
struct Normalizer {
  bool enabled = false;
  long long count = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd var;

  explicit Normalizer(int dim = 0, bool enabled_ = false)
      : enabled(enabled_), mean(Eigen::VectorXd::Zero(dim)), var(Eigen::VectorXd::Ones(dim)) {}
  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  void update(const Eigen::MatrixXd& samples);  // columns = samples
};

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action);
double gaussian_entropy(const Eigen::VectorXd& log_std);

struct ActionSample {
  Eigen::VectorXd raw;      // pre-clamp Gaussian draw (stored in the batch)
  Eigen::VectorXd clamped;  // applied to the environment
  double log_prob = 0.0;    // density of the raw draw
};
ActionSample sample_action(const PolicyParams& params, const Eigen::VectorXd& obs, Rng& rng);

// Standard GAE recursion; dones[t] = 1 marks that the transition at t ended
// its episode (no bootstrap across it). Returns are advantages + values.
void compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                 const Eigen::VectorXd& dones, double bootstrap_value, double gamma,
                 double lambda, Eigen::VectorXd& advantages, Eigen::VectorXd& returns);

// min(r * A, clip(r, 1-eps, 1+eps) * A) with r = exp(logp_new - logp_old)
double clipped_objective(double log_prob_new, double log_prob_old, double advantage,
                         double epsilon);

struct RolloutBatch {
  Eigen::MatrixXd obs;      // obs_dim x N (normalized)
  Eigen::MatrixXd actions;  // act_dim x N (pre-clamp)
  Eigen::VectorXd log_probs;
  Eigen::VectorXd rewards;
  Eigen::VectorXd values;
  Eigen::VectorXd dones;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
  Eigen::Index size() const { return obs.cols(); }
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(int n = 0) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
  void apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);
};

// Combined loss (policy surrogate, value MSE, entropy bonus) and its exact
// gradient in flat parameter order; exposed for the finite-difference check.
double ppo_loss_and_grad(const PolicyParams& params, const RolloutBatch& batch,
                         const std::vector<int>& indices, const PpoConfig& cfg,
                         Eigen::VectorXd* grad_out);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// One PPO update: `epochs` passes of shuffled minibatches with Adam.
UpdateStats ppo_update(PolicyParams& params, AdamState& adam, RolloutBatch& batch,
                       const PpoConfig& cfg, Rng& rng);

struct IterationMetrics {
  int iteration = 0;
  long long global_steps = 0;
  int episodes = 0;
  double mean_episode_reward = 0.0;
  double mean_episode_length = 0.0;
  double collision_rate = 0.0;
  double goal_rate = 0.0;
  double mean_abs_cte = 0.0;
  double mean_reward_per_step = 0.0;
  UpdateStats update;
  std::string to_json() const;
};

// Hands each episode its scenario; training uses the stochastic generator,
// fixed setups just return copies.
using ScenarioSource = std::function<Scenario(Rng&)>;

// Algorithm: iterate { collect horizon steps from each actor in parallel,
// estimate advantages, update the networks }. Fully deterministic given the
// seed, including across checkpoint/resume.
class Trainer {
 public:
  Trainer(EnvParams env_params, ScenarioSource source, PpoConfig cfg, std::uint64_t seed);

  void run(int iterations, const std::function<void(const IterationMetrics&)>& on_iteration);

  const PolicyParams& params() const { return params_; }
  const Normalizer& normalizer() const { return normalizer_; }
  int iteration() const { return iteration_; }
  long long global_steps() const { return global_steps_; }

  std::string checkpoint_json(std::uint64_t config_hash) const;
  static Trainer restore(const std::string& checkpoint, EnvParams env_params,
                         ScenarioSource source, const PpoConfig& cfg,
                         std::uint64_t expected_config_hash);

 private:
  struct Actor {
    std::unique_ptr<Environment> env;
    Rng rng{0};
    Eigen::VectorXd obs;  // raw (unnormalized)
    double episode_reward = 0.0;
    int episode_steps = 0;
    double episode_abs_cte = 0.0;
  };

  struct EpisodeRecord {
    double reward = 0.0;
    int steps = 0;
    Termination cause = Termination::None;
  };

  void start_episode(Actor& a);
  IterationMetrics collect_and_update();

  EnvParams env_params_;
  ScenarioSource source_;
  PpoConfig cfg_;
  PolicyParams params_;
  AdamState adam_;
  Normalizer normalizer_;
  std::vector<Actor> actors_;
  Rng update_rng_{0};
  int iteration_ = 0;
  long long global_steps_ = 0;
};

// Checkpoint file helpers (JSON; doubles survive round-trips exactly).
void save_checkpoint_file(const std::string& path, const std::string& payload);
struct PolicySnapshot {
  PolicyParams params;
  Normalizer normalizer;
  std::uint64_t config_hash = 0;
};
PolicySnapshot load_policy_snapshot(const std::string& path);

}  // namespace asv
