#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "moviebot/core/encoding.hpp"
#include "moviebot/core/state.hpp"
#include "moviebot/policy/actions.hpp"
#include "moviebot/policy/mlp.hpp"
#include "moviebot/util/rng.hpp"

namespace moviebot::policy {

// Picks the next agent action from the tracked state. Implementations that
// carry mutable state (the random policy) must be cloned per session or
// per worker thread; the others are immutable after construction.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual AgentAction act(const DialogueState& state) = 0;
  // Called before every episode; the random policy reseeds here.
  virtual void begin_episode(std::uint64_t /*seed*/) {}
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual std::string name() const = 0;
};

// Hand-written cascade, first match wins:
//   turn_count >= max_turns      BYE
//   accepted                     BYE
//   first turn                   ELICIT(genre)
//   user just asked (INQUIRE)    INFORM, when something was recommended
//   last recommendation rejected CONTINUE_REC
//   should_make_offer            RECOMMEND
//   some slot unfilled           ELICIT(first of genre, actor, director, keyword)
//   otherwise                    RECOMMEND
AgentAction rule_policy_next(const DialogueState& state, int max_turns = kDefaultMaxTurns);

class RulePolicy : public Policy {
 public:
  explicit RulePolicy(int max_turns = kDefaultMaxTurns) : max_turns_(max_turns) {}
  AgentAction act(const DialogueState& state) override { return rule_policy_next(state, max_turns_); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RulePolicy>(*this); }
  std::string name() const override { return "rule"; }

 private:
  int max_turns_;
};

// Uniform over the 9 actions.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed = 0) : rng_(seed) {}
  AgentAction act(const DialogueState&) override;
  void begin_episode(std::uint64_t seed) override { rng_ = Rng(mix_seed(seed, 77)); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<RandomPolicy>(*this); }
  std::string name() const override { return "random"; }

 private:
  Rng rng_;
};

enum class LearnedKind : std::uint8_t { kDqn = 0, kA2c = 1 };
std::string_view name(LearnedKind k);

// Greedy policy over a trained network. For DQN the outputs are Q values;
// for A2C the first 9 outputs are logits and the last is the state value,
// and argmax of the logits equals argmax of the action probabilities.
class LearnedPolicy : public Policy {
 public:
  LearnedPolicy(LearnedKind kind, EncoderKind encoder, Mlp net,
                int max_turns = kDefaultMaxTurns);

  AgentAction act(const DialogueState& state) override;
  // Greedy action for an encoded observation; ties to the lowest index.
  // DimensionError on a wrong length.
  AgentAction act_observation(std::span<const double> obs) const;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<LearnedPolicy>(*this); }
  std::string name() const override { return std::string(policy::name(kind_)); }

  LearnedKind kind() const { return kind_; }
  EncoderKind encoder() const { return encoder_; }
  int max_turns() const { return max_turns_; }
  const Mlp& net() const { return net_; }

 private:
  LearnedKind kind_;
  EncoderKind encoder_;
  Mlp net_;
  int max_turns_;
};

// "POL1" binary format: magic, u32 version, u8 policy kind, u8 encoder
// kind, u32 action inventory version, u32 max_turns, u32 layer count,
// u64 sizes, u64 parameter count, little-endian doubles.
void save_policy(const std::string& path, const LearnedPolicy& policy);
LearnedPolicy load_policy(const std::string& path);

}  // namespace moviebot::policy
