#include "asv/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace asv {

using nlohmann::json;

PolicyParams PolicyParams::make(int obs_dim, int act_dim, const std::vector<int>& hidden,
                                double log_std_init, Rng& rng) {
  PolicyParams p;
  p.policy = Mlp(obs_dim, hidden, act_dim);
  p.policy.init_orthogonal(rng, std::sqrt(2.0), 0.01);
  p.log_std = Eigen::VectorXd::Constant(act_dim, log_std_init);
  p.value = Mlp(obs_dim, hidden, 1);
  p.value.init_orthogonal(rng, std::sqrt(2.0), 1.0);
  return p;
}

void PolicyParams::clamp_log_std() {
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

int PolicyParams::param_count() const {
  return policy.param_count() + static_cast<int>(log_std.size()) + value.param_count();
}

Eigen::VectorXd PolicyParams::to_flat() const {
  Eigen::VectorXd flat(param_count());
  int off = 0;
  policy.append_flat(flat, off);
  for (Eigen::Index i = 0; i < log_std.size(); ++i) flat(off++) = log_std(i);
  value.append_flat(flat, off);
  return flat;
}

void PolicyParams::from_flat(const Eigen::VectorXd& flat) {
  int off = 0;
  policy.read_flat(flat, off);
  for (Eigen::Index i = 0; i < log_std.size(); ++i) log_std(i) = flat(off++);
  value.read_flat(flat, off);
}

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo config: gamma must be in (0, 1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("ppo config: gae_lambda must be in (0, 1]");
  if (!(clip > 0.0 && clip < 1.0)) throw std::invalid_argument("ppo config: clip must be in (0, 1)");
  if (horizon <= 0 || n_actors <= 0 || epochs <= 0 || minibatches <= 0)
    throw std::invalid_argument("ppo config: horizon, actors, epochs, minibatches must be positive");
  if (static_cast<long long>(horizon) * n_actors < minibatches)
    throw std::invalid_argument("ppo config: more minibatches than samples");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("ppo config: learning rate must be positive");
}

Eigen::VectorXd Normalizer::normalize(const Eigen::VectorXd& x) const {
  if (!enabled || count == 0) return x;
  return (x - mean).cwiseQuotient((var.array() + 1e-8).sqrt().matrix());
}

void Normalizer::update(const Eigen::MatrixXd& samples) {
  if (!enabled || samples.cols() == 0) return;
  const long long nb = samples.cols();
  const Eigen::VectorXd mb = samples.rowwise().mean();
  Eigen::VectorXd m2b = Eigen::VectorXd::Zero(samples.rows());
  for (Eigen::Index j = 0; j < samples.cols(); ++j)
    m2b += (samples.col(j) - mb).array().square().matrix();
  if (count == 0) {
    mean = mb;
    var = m2b / static_cast<double>(nb);
    count = nb;
    return;
  }
  const double n1 = static_cast<double>(count);
  const double n2 = static_cast<double>(nb);
  const Eigen::VectorXd delta = mb - mean;
  const double total = n1 + n2;
  mean += delta * (n2 / total);
  const Eigen::VectorXd m2 =
      var * n1 + m2b + delta.array().square().matrix() * (n1 * n2 / total);
  var = m2 / total;
  count += nb;
}

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action) {
  const Eigen::ArrayXd z = (action - mean).array() / log_std.array().exp();
  return -0.5 * z.square().sum() - log_std.sum() -
         0.5 * mean.size() * std::log(2.0 * kPi);
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * log_std.size() * std::log(2.0 * kPi * std::exp(1.0));
}

ActionSample sample_action(const PolicyParams& params, const Eigen::VectorXd& obs, Rng& rng) {
  ActionSample s;
  const Eigen::VectorXd mean = params.policy.forward(obs);
  const Eigen::VectorXd sigma = params.log_std.array().exp();
  s.raw.resize(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) s.raw(i) = mean(i) + sigma(i) * rng.normal();
  s.log_prob = gaussian_log_prob(mean, params.log_std, s.raw);
  s.clamped = s.raw.cwiseMax(-1.0).cwiseMin(1.0);
  return s;
}

void compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                 const Eigen::VectorXd& dones, double bootstrap_value, double gamma,
                 double lambda, Eigen::VectorXd& advantages, Eigen::VectorXd& returns) {
  const Eigen::Index n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("gae: rewards, values and dones must have equal length");
  advantages.resize(n);
  returns.resize(n);
  double carry = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double nonterminal = 1.0 - dones(t);
    const double next_value = (t == n - 1) ? bootstrap_value : values(t + 1);
    const double delta = rewards(t) + gamma * next_value * nonterminal - values(t);
    carry = delta + gamma * lambda * nonterminal * carry;
    advantages(t) = carry;
  }
  returns = advantages + values;
}

double clipped_objective(double log_prob_new, double log_prob_old, double advantage,
                         double epsilon) {
  const double ratio = std::exp(log_prob_new - log_prob_old);
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

void AdamState::apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  ++step;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  params -= (lr / bc1) * m.cwiseQuotient(((v / bc2).array().sqrt() + eps).matrix());
}

namespace {

struct MinibatchStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

double loss_and_grad_impl(const PolicyParams& params, const RolloutBatch& batch,
                          const std::vector<int>& indices, const PpoConfig& cfg,
                          Eigen::VectorXd* grad_out, MinibatchStats* stats) {
  const int m = static_cast<int>(indices.size());
  const int obs_dim = params.obs_dim();
  const int act_dim = params.act_dim();

  Eigen::MatrixXd X(obs_dim, m), A(act_dim, m);
  Eigen::VectorXd lp_old(m), adv(m), ret(m);
  for (int j = 0; j < m; ++j) {
    X.col(j) = batch.obs.col(indices[j]);
    A.col(j) = batch.actions.col(indices[j]);
    lp_old(j) = batch.log_probs(indices[j]);
    adv(j) = batch.advantages(indices[j]);
    ret(j) = batch.returns(indices[j]);
  }

  Mlp::Cache policy_cache, value_cache;
  const Eigen::MatrixXd mean = params.policy.forward_cached(X, policy_cache);
  const Eigen::MatrixXd val = params.value.forward_cached(X, value_cache);
  const Eigen::VectorXd sigma = params.log_std.array().exp();
  const double log_norm =
      params.log_std.sum() + 0.5 * act_dim * std::log(2.0 * kPi);

  Eigen::MatrixXd Z(act_dim, m);
  Eigen::VectorXd lp_new(m);
  for (int j = 0; j < m; ++j) {
    Z.col(j) = (A.col(j) - mean.col(j)).cwiseQuotient(sigma);
    lp_new(j) = -0.5 * Z.col(j).squaredNorm() - log_norm;
  }

  double objective = 0.0;
  double clip_hits = 0.0;
  double kl = 0.0;
  Eigen::VectorXd d_obj_d_lp(m);
  for (int j = 0; j < m; ++j) {
    const double ratio = std::exp(lp_new(j) - lp_old(j));
    const double unclipped = ratio * adv(j);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv(j);
    if (unclipped <= clipped) {
      objective += unclipped;
      d_obj_d_lp(j) = unclipped;  // d(r A)/d lp_new = r A
    } else {
      objective += clipped;
      const bool inside = ratio > 1.0 - cfg.clip && ratio < 1.0 + cfg.clip;
      d_obj_d_lp(j) = inside ? unclipped : 0.0;
    }
    if (std::abs(ratio - 1.0) > cfg.clip) clip_hits += 1.0;
    kl += (ratio - 1.0) - (lp_new(j) - lp_old(j));
  }
  objective /= m;

  const Eigen::VectorXd v_err = val.row(0).transpose() - ret;
  const double value_loss = v_err.squaredNorm() / m;
  const double entropy = gaussian_entropy(params.log_std);
  const double loss = -objective + cfg.vf_coef * value_loss - cfg.ent_coef * entropy;

  if (stats) {
    stats->policy_loss = -objective;
    stats->value_loss = value_loss;
    stats->entropy = entropy;
    stats->clip_fraction = clip_hits / m;
    stats->approx_kl = kl / m;
  }

  if (grad_out) {
    Eigen::MatrixXd d_mean(act_dim, m);
    Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(act_dim);
    for (int j = 0; j < m; ++j) {
      const double d_loss_d_lp = -d_obj_d_lp(j) / m;
      d_mean.col(j) = d_loss_d_lp * Z.col(j).cwiseQuotient(sigma);
      d_log_std += d_loss_d_lp * (Z.col(j).array().square() - 1.0).matrix();
    }
    d_log_std.array() -= cfg.ent_coef;  // entropy bonus acts on log_std only

    Mlp policy_grad = params.policy.zeros_like();
    Mlp value_grad = params.value.zeros_like();
    params.policy.backward(policy_cache, d_mean, policy_grad);
    const Eigen::MatrixXd d_val = (2.0 * cfg.vf_coef / m) * v_err.transpose();
    params.value.backward(value_cache, d_val, value_grad);

    grad_out->resize(params.param_count());
    int off = 0;
    policy_grad.append_flat(*grad_out, off);
    for (Eigen::Index i = 0; i < d_log_std.size(); ++i) (*grad_out)(off++) = d_log_std(i);
    value_grad.append_flat(*grad_out, off);
  }
  return loss;
}

}  // namespace

double ppo_loss_and_grad(const PolicyParams& params, const RolloutBatch& batch,
                         const std::vector<int>& indices, const PpoConfig& cfg,
                         Eigen::VectorXd* grad_out) {
  return loss_and_grad_impl(params, batch, indices, cfg, grad_out, nullptr);
}

UpdateStats ppo_update(PolicyParams& params, AdamState& adam, RolloutBatch& batch,
                       const PpoConfig& cfg, Rng& rng) {
  const int n = static_cast<int>(batch.size());
  if (cfg.normalize_advantages) {
    const double mean = batch.advantages.mean();
    const double sd =
        std::sqrt((batch.advantages.array() - mean).square().sum() / n);
    batch.advantages = (batch.advantages.array() - mean) / (sd + 1e-8);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateStats total;
  int updates = 0;
  Eigen::VectorXd flat = params.to_flat();
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
    for (int mb = 0; mb < cfg.minibatches; ++mb) {
      const int begin = static_cast<int>(static_cast<long long>(mb) * n / cfg.minibatches);
      const int end = static_cast<int>(static_cast<long long>(mb + 1) * n / cfg.minibatches);
      if (end <= begin) continue;
      const std::vector<int> idx(order.begin() + begin, order.begin() + end);

      MinibatchStats stats;
      const double loss = loss_and_grad_impl(params, batch, idx, cfg, &grad, &stats);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "ppo update: non-finite loss in epoch " << epoch << ", minibatch " << mb;
        throw SimulationFault(msg.str());
      }
      adam.apply(flat, grad, cfg.learning_rate);
      params.from_flat(flat);
      params.clamp_log_std();
      flat = params.to_flat();  // picks up the log-std clamp

      total.policy_loss += stats.policy_loss;
      total.value_loss += stats.value_loss;
      total.entropy += stats.entropy;
      total.clip_fraction += stats.clip_fraction;
      total.approx_kl += stats.approx_kl;
      ++updates;
    }
  }
  if (updates > 0) {
    total.policy_loss /= updates;
    total.value_loss /= updates;
    total.entropy /= updates;
    total.clip_fraction /= updates;
    total.approx_kl /= updates;
  }
  return total;
}

std::string IterationMetrics::to_json() const {
  json j;
  j["iteration"] = iteration;
  j["global_steps"] = global_steps;
  j["episodes"] = episodes;
  j["mean_episode_reward"] = mean_episode_reward;
  j["mean_episode_length"] = mean_episode_length;
  j["collision_rate"] = collision_rate;
  j["goal_rate"] = goal_rate;
  j["mean_abs_cte"] = mean_abs_cte;
  j["mean_reward_per_step"] = mean_reward_per_step;
  j["policy_loss"] = update.policy_loss;
  j["value_loss"] = update.value_loss;
  j["entropy"] = update.entropy;
  j["clip_fraction"] = update.clip_fraction;
  j["approx_kl"] = update.approx_kl;
  return j.dump();
}

Trainer::Trainer(EnvParams env_params, ScenarioSource source, PpoConfig cfg,
                 std::uint64_t seed)
    : env_params_(std::move(env_params)), source_(std::move(source)), cfg_(cfg) {
  cfg_.validate();
  Rng init_rng(seed);
  const int obs_dim = 6 + 3 * env_params_.sensor.n_sectors;
  params_ = PolicyParams::make(obs_dim, 2, cfg_.hidden, cfg_.log_std_init, init_rng);
  adam_ = AdamState(params_.param_count());
  normalizer_ = Normalizer(obs_dim, cfg_.normalize_observations);
  update_rng_ = init_rng.split(0xA11CE);
  actors_.resize(cfg_.n_actors);
  for (int a = 0; a < cfg_.n_actors; ++a) {
    actors_[a].rng = init_rng.split(a + 1);
    start_episode(actors_[a]);
  }
}

void Trainer::start_episode(Actor& a) {
  Scenario scenario = source_(a.rng);
  a.env = std::make_unique<Environment>(env_params_, std::move(scenario));
  a.obs = a.env->reset(a.rng);
  a.episode_reward = 0.0;
  a.episode_steps = 0;
  a.episode_abs_cte = 0.0;
}

IterationMetrics Trainer::collect_and_update() {
  const int T = cfg_.horizon;
  const int NA = cfg_.n_actors;
  const int obs_dim = params_.obs_dim();
  const int act_dim = params_.act_dim();
  const Normalizer frozen = normalizer_;

  struct Buffer {
    Eigen::MatrixXd raw_obs, norm_obs, actions;
    Eigen::VectorXd log_probs, rewards, values, dones;
    double bootstrap = 0.0;
    std::vector<EpisodeRecord> episodes;
    double abs_cte_sum = 0.0;
    double reward_sum = 0.0;
  };
  std::vector<Buffer> buffers(NA);
  for (auto& b : buffers) {
    b.raw_obs.resize(obs_dim, T);
    b.norm_obs.resize(obs_dim, T);
    b.actions.resize(act_dim, T);
    b.log_probs.resize(T);
    b.rewards.resize(T);
    b.values.resize(T);
    b.dones.resize(T);
  }

  auto collect = [&](int a) {
    Actor& actor = actors_[a];
    Buffer& buf = buffers[a];
    for (int t = 0; t < T; ++t) {
      const Eigen::VectorXd norm = frozen.normalize(actor.obs);
      buf.raw_obs.col(t) = actor.obs;
      buf.norm_obs.col(t) = norm;
      const ActionSample action = sample_action(params_, norm, actor.rng);
      buf.actions.col(t) = action.raw;
      buf.log_probs(t) = action.log_prob;
      buf.values(t) = params_.value.forward(norm)(0);

      const StepResult res = actor.env->step(action.clamped);
      buf.rewards(t) = res.reward;
      buf.dones(t) = res.done ? 1.0 : 0.0;
      buf.abs_cte_sum += std::abs(res.nav.cross_track);
      buf.reward_sum += res.reward;
      actor.episode_reward += res.reward;
      actor.episode_steps += 1;

      if (res.done) {
        buf.episodes.push_back({actor.episode_reward, actor.episode_steps, res.cause});
        start_episode(actor);
      } else {
        actor.obs = res.observation;
      }
    }
    buf.bootstrap = params_.value.forward(frozen.normalize(actor.obs))(0);
  };

  if (NA > 1) {
    std::vector<std::thread> threads;
    threads.reserve(NA);
    for (int a = 0; a < NA; ++a) threads.emplace_back(collect, a);
    for (auto& th : threads) th.join();
  } else {
    collect(0);
  }

  // assemble the batch in actor order (scheduling independent)
  RolloutBatch batch;
  const int n = NA * T;
  batch.obs.resize(obs_dim, n);
  batch.actions.resize(act_dim, n);
  batch.log_probs.resize(n);
  batch.rewards.resize(n);
  batch.values.resize(n);
  batch.dones.resize(n);
  batch.advantages.resize(n);
  batch.returns.resize(n);
  Eigen::VectorXd adv(T), ret(T);
  for (int a = 0; a < NA; ++a) {
    Buffer& b = buffers[a];
    compute_gae(b.rewards, b.values, b.dones, b.bootstrap, cfg_.gamma, cfg_.gae_lambda,
                adv, ret);
    const int off = a * T;
    batch.obs.middleCols(off, T) = b.norm_obs;
    batch.actions.middleCols(off, T) = b.actions;
    batch.log_probs.segment(off, T) = b.log_probs;
    batch.rewards.segment(off, T) = b.rewards;
    batch.values.segment(off, T) = b.values;
    batch.dones.segment(off, T) = b.dones;
    batch.advantages.segment(off, T) = adv;
    batch.returns.segment(off, T) = ret;
  }

  const UpdateStats stats = ppo_update(params_, adam_, batch, cfg_, update_rng_);

  if (cfg_.normalize_observations) {
    for (int a = 0; a < NA; ++a) normalizer_.update(buffers[a].raw_obs);
  }

  ++iteration_;
  global_steps_ += n;

  IterationMetrics m;
  m.iteration = iteration_;
  m.global_steps = global_steps_;
  m.update = stats;
  double cte = 0.0, reward = 0.0, ep_reward = 0.0, ep_len = 0.0;
  int episodes = 0, collisions = 0, goals = 0;
  for (const auto& b : buffers) {
    cte += b.abs_cte_sum;
    reward += b.reward_sum;
    for (const auto& e : b.episodes) {
      ++episodes;
      ep_reward += e.reward;
      ep_len += e.steps;
      if (e.cause == Termination::Collision) ++collisions;
      if (e.cause == Termination::Goal) ++goals;
    }
  }
  m.episodes = episodes;
  m.mean_abs_cte = cte / n;
  m.mean_reward_per_step = reward / n;
  if (episodes > 0) {
    m.mean_episode_reward = ep_reward / episodes;
    m.mean_episode_length = ep_len / episodes;
    m.collision_rate = static_cast<double>(collisions) / episodes;
    m.goal_rate = static_cast<double>(goals) / episodes;
  }
  return m;
}

void Trainer::run(int iterations,
                  const std::function<void(const IterationMetrics&)>& on_iteration) {
  for (int i = 0; i < iterations; ++i) {
    const IterationMetrics m = collect_and_update();
    if (on_iteration) on_iteration(m);
  }
}

namespace {

json mlp_to_json(const Mlp& net) {
  json j;
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (const auto& w : net.weights) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(i, c));
      rows.push_back(row);
    }
    j["weights"].push_back(rows);
  }
  for (const auto& b : net.biases) {
    json bj = json::array();
    for (Eigen::Index i = 0; i < b.size(); ++i) bj.push_back(b(i));
    j["biases"].push_back(bj);
  }
  return j;
}

Mlp mlp_from_json(const json& j) {
  const auto& weights = j.at("weights");
  const int input = static_cast<int>(weights.at(0).at(0).size());
  const int output = static_cast<int>(weights.at(weights.size() - 1).size());
  std::vector<int> hidden;
  for (std::size_t l = 0; l + 1 < weights.size(); ++l)
    hidden.push_back(static_cast<int>(weights.at(l).size()));
  Mlp net(input, hidden, output);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    auto& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(i, c) = weights.at(l).at(i).at(c).get<double>();
    const auto& bj = j.at("biases").at(l);
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i)
      net.biases[l](i) = bj.at(i).get<double>();
  }
  return net;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

json params_to_json(const PolicyParams& p) {
  json j;
  j["policy"] = mlp_to_json(p.policy);
  j["log_std"] = vector_to_json(p.log_std);
  j["value"] = mlp_to_json(p.value);
  return j;
}

PolicyParams params_from_json(const json& j) {
  PolicyParams p;
  p.policy = mlp_from_json(j.at("policy"));
  p.log_std = vector_from_json(j.at("log_std"));
  p.value = mlp_from_json(j.at("value"));
  return p;
}

json normalizer_to_json(const Normalizer& n) {
  json j;
  j["enabled"] = n.enabled;
  j["count"] = n.count;
  j["mean"] = vector_to_json(n.mean);
  j["var"] = vector_to_json(n.var);
  return j;
}

Normalizer normalizer_from_json(const json& j) {
  Normalizer n;
  n.enabled = j.at("enabled").get<bool>();
  n.count = j.at("count").get<long long>();
  n.mean = vector_from_json(j.at("mean"));
  n.var = vector_from_json(j.at("var"));
  return n;
}

}  // namespace

std::string Trainer::checkpoint_json(std::uint64_t config_hash) const {
  json j;
  j["format"] = "asv-checkpoint-v1";
  j["config_hash"] = config_hash;
  j["iteration"] = iteration_;
  j["global_steps"] = global_steps_;
  j["params"] = params_to_json(params_);
  j["adam"] = {{"m", vector_to_json(adam_.m)},
               {"v", vector_to_json(adam_.v)},
               {"step", adam_.step}};
  j["normalizer"] = normalizer_to_json(normalizer_);
  j["update_rng"] = update_rng_.state;
  j["actors"] = json::array();
  for (const auto& a : actors_) {
    json aj;
    aj["rng"] = a.rng.state;
    aj["scenario"] = json::parse(scenario_to_json(a.env->scenario()));
    const Environment::Continuation c = a.env->save_continuation();
    aj["continuation"] = {{"x", c.vessel.x},   {"y", c.vessel.y}, {"psi", c.vessel.psi},
                          {"u", c.vessel.u},   {"v", c.vessel.v}, {"r", c.vessel.r},
                          {"time", c.time},    {"omega", c.omega},
                          {"steps", c.steps},  {"done", c.done}};
    aj["obs"] = vector_to_json(a.obs);
    aj["episode_reward"] = a.episode_reward;
    aj["episode_steps"] = a.episode_steps;
    aj["episode_abs_cte"] = a.episode_abs_cte;
    j["actors"].push_back(aj);
  }
  return j.dump();
}

Trainer Trainer::restore(const std::string& checkpoint, EnvParams env_params,
                         ScenarioSource source, const PpoConfig& cfg,
                         std::uint64_t expected_config_hash) {
  json j = json::parse(checkpoint);
  if (j.value("format", "") != "asv-checkpoint-v1")
    throw std::invalid_argument("checkpoint: missing or unsupported format tag");
  const std::uint64_t stored = j.at("config_hash").get<std::uint64_t>();
  if (stored != expected_config_hash) {
    std::ostringstream msg;
    msg << "checkpoint config hash mismatch: checkpoint has 0x" << std::hex << stored
        << ", run config is 0x" << expected_config_hash;
    throw std::invalid_argument(msg.str());
  }

  Trainer t(env_params, source, cfg, /*seed=*/0);
  t.params_ = params_from_json(j.at("params"));
  t.adam_ = AdamState(t.params_.param_count());
  t.adam_.m = vector_from_json(j.at("adam").at("m"));
  t.adam_.v = vector_from_json(j.at("adam").at("v"));
  t.adam_.step = j.at("adam").at("step").get<long long>();
  t.normalizer_ = normalizer_from_json(j.at("normalizer"));
  t.update_rng_.state = j.at("update_rng").get<std::uint64_t>();
  t.iteration_ = j.at("iteration").get<int>();
  t.global_steps_ = j.at("global_steps").get<long long>();

  const json& actors = j.at("actors");
  if (static_cast<int>(actors.size()) != cfg.n_actors)
    throw std::invalid_argument("checkpoint: actor count does not match the run config");
  for (int a = 0; a < cfg.n_actors; ++a) {
    const json& aj = actors.at(a);
    Actor& actor = t.actors_[a];
    actor.rng.state = aj.at("rng").get<std::uint64_t>();
    Scenario scenario = scenario_from_json(aj.at("scenario").dump());
    actor.env = std::make_unique<Environment>(env_params, std::move(scenario));
    const json& cj = aj.at("continuation");
    Environment::Continuation c;
    c.vessel.x = cj.at("x");
    c.vessel.y = cj.at("y");
    c.vessel.psi = cj.at("psi");
    c.vessel.u = cj.at("u");
    c.vessel.v = cj.at("v");
    c.vessel.r = cj.at("r");
    c.time = cj.at("time");
    c.omega = cj.at("omega");
    c.steps = cj.at("steps");
    c.done = cj.at("done");
    actor.env->restore_continuation(c);
    actor.obs = vector_from_json(aj.at("obs"));
    actor.episode_reward = aj.at("episode_reward");
    actor.episode_steps = aj.at("episode_steps");
    actor.episode_abs_cte = aj.at("episode_abs_cte");
  }
  return t;
}

void save_checkpoint_file(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot write '" + tmp + "'");
    out << payload;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("checkpoint: cannot move '" + tmp + "' to '" + path + "'");
}

PolicySnapshot load_policy_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("checkpoint: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str());
  if (j.value("format", "") != "asv-checkpoint-v1")
    throw std::invalid_argument("checkpoint: missing or unsupported format tag");
  PolicySnapshot s;
  s.params = params_from_json(j.at("params"));
  s.normalizer = normalizer_from_json(j.at("normalizer"));
  s.config_hash = j.at("config_hash").get<std::uint64_t>();
  return s;
}

}  // namespace asv
