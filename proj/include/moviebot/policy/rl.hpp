#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "moviebot/policy/mlp.hpp"

namespace moviebot::policy {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  // Ended by a time limit rather than a terminal state: learners may still
  // bootstrap from the final observation.
  bool truncated = false;
  bool success = false;  // meaningful when done
};

// Episodic reset/step interface shared by the dialogue environments and
// the small test MDPs.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t observation_size() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::size_t action) = 0;
};

struct TrainConfig {
  double gamma = 0.99;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // of the step (or episode) budget
  std::size_t target_sync = 100;        // gradient steps between target copies
  std::size_t replay_capacity = 10000;
  std::size_t n_step = 5;               // A2C rollout length
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::size_t episodes = 1000;
  // When > 0 training stops after this many environment steps and the
  // epsilon schedule runs over steps; otherwise it runs over episodes.
  std::size_t max_steps = 0;
  std::vector<std::size_t> hidden = {64, 64};
  // Rewards are multiplied by this before entering any loss, so the
  // +100/-1000 scale does not blow up plain SGD. Greedy actions are
  // unaffected.
  double reward_scale = 0.01;
  double grad_clip = 10.0;  // global L2 norm; 0 disables
  bool adam = false;
  std::uint64_t seed = 1;

  // Throws ConfigError unless rates lie in (0, 1], episodes >= 1, etc.
  void validate() const;
};

// Linear decay from epsilon_start to epsilon_end over the first
// epsilon_decay_fraction * total units, constant afterwards.
double epsilon_at(std::size_t unit, std::size_t total_units, const TrainConfig& cfg);

struct CurveRow {
  std::size_t episode = 0;
  double reward = 0.0;  // unscaled episode return
  bool success = false;
  std::size_t turns = 0;  // agent actions taken
  double epsilon = 0.0;
};

struct TrainResult {
  Mlp net;
  std::vector<CurveRow> curve;
  std::size_t env_steps = 0;
  std::size_t grad_steps = 0;
};

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& curve);

// Deep Q-learning: epsilon-greedy acting, uniform replay, target network,
// squared TD loss, SGD (or Adam). Episode i resets with mix_seed(seed, i).
// Single-threaded and bit-reproducible under cfg.seed.
// on_sync, when set, sees (online, target) right after every target copy.
using SyncObserver = std::function<void(const Mlp& online, const Mlp& target)>;
TrainResult dqn_train(Environment& env, const TrainConfig& cfg,
                      const SyncObserver& on_sync = {});

// Advantage actor-critic with n-step returns. One network: outputs
// [0, A) are action logits (clipped to +-30), output A is the state value.
TrainResult a2c_train(Environment& env, const TrainConfig& cfg);

// Softmax of logits clipped to [-30, 30]. NumericalError on NaN/inf input.
std::vector<double> stable_softmax(std::span<const double> logits);
double entropy(std::span<const double> probs);

}  // namespace moviebot::policy
