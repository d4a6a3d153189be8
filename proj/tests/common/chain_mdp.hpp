#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "moviebot/policy/rl.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::testing {

// s0 -> s1 -> s2 (terminal). Action 0 advances, action 1 stays put.
// Reward 1 on entering s2, 0 otherwise. Episodes are cut after max_steps
// (truncated, not terminal). Observation is a one-hot over {s0, s1, s2}.
class ChainMdp : public policy::Environment {
 public:
  static constexpr std::size_t kAdvance = 0, kStay = 1;
  explicit ChainMdp(int max_steps = 20) : max_steps_(max_steps) {}

  std::size_t observation_size() const override { return 3; }
  std::size_t num_actions() const override { return 2; }
  std::vector<double> reset(std::uint64_t) override {
    state_ = 0;
    steps_ = 0;
    return obs();
  }
  policy::StepResult step(std::size_t a) override {
    if (state_ == 2) throw InactiveEpisodeError("chain episode already finished");
    ++steps_;
    if (a == kAdvance) ++state_;
    policy::StepResult r;
    r.reward = state_ == 2 ? 1.0 : 0.0;
    r.done = state_ == 2 || steps_ >= max_steps_;
    r.truncated = r.done && state_ != 2;
    r.success = state_ == 2;
    r.observation = obs();
    if (r.done && state_ != 2) state_ = 2;
    return r;
  }

  static std::vector<double> one_hot(int s) {
    std::vector<double> v(3, 0.0);
    v[static_cast<std::size_t>(s)] = 1.0;
    return v;
  }

 private:
  std::vector<double> obs() const { return one_hot(state_); }
  int state_ = 0;
  int steps_ = 0;
  int max_steps_;
};

// Q* for the chain by value iteration (independent of any learner).
inline std::array<std::array<double, 2>, 2> chain_q_star(double gamma) {
  std::array<double, 3> v{0, 0, 0};
  std::array<std::array<double, 2>, 2> q{};
  for (int it = 0; it < 1000; ++it) {
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        const int next = a == 0 ? s + 1 : s;
        const double r = next == 2 ? 1.0 : 0.0;
        q[s][a] = r + (next == 2 ? 0.0 : gamma * v[next]);
      }
    }
    for (int s = 0; s < 2; ++s) v[s] = std::max(q[s][0], q[s][1]);
  }
  return q;
}

inline policy::TrainConfig chain_dqn_config(std::uint64_t seed) {
  policy::TrainConfig cfg;
  cfg.gamma = 0.9;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 32;
  cfg.target_sync = 50;
  cfg.max_steps = 3000;
  cfg.hidden = {16, 16};
  cfg.reward_scale = 1.0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace moviebot::testing
