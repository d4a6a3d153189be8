#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moviebot/core/encoding.hpp"
#include "moviebot/core/nlg.hpp"
#include "moviebot/core/state.hpp"
#include "moviebot/nlu/corpus.hpp"
#include "moviebot/nlu/engine.hpp"
#include "moviebot/policy/actions.hpp"
#include "moviebot/policy/rl.hpp"
#include "moviebot/sim/simulator.hpp"

namespace moviebot::sim {

struct RewardSpec {
  double accepted = 100.0;
  double none_accepted = -50.0;
  double no_recommendation = -100.0;
  double tracker_exception = -1000.0;
  double per_turn = -1.0;  // paid on every step; 0 disables
};

enum class EnvMode : std::uint8_t { kAnnotation, kNlu };
std::string_view name(EnvMode m);
std::optional<EnvMode> parse_env_mode(std::string_view s);

struct EnvConfig {
  EnvMode mode = EnvMode::kAnnotation;
  EncoderKind encoder = EncoderKind::kBasic;
  RewardSpec reward;
  SimulatorConfig simulator;
  int max_turns = kDefaultMaxTurns;  // utterances, both speakers
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  std::vector<Utterance> transcript;
  double total_reward = 0.0;
  bool success = false;
  bool tracker_failed = false;
  std::string error;  // StateUpdateError message when tracker_failed
  std::size_t utterance_count() const { return transcript.size(); }
};

// Returns true to make the tracker fail on this act (test hook for the
// exception reward case).
using FaultHook = std::function<bool(const DialogueState& state, const DialogueAct& act,
                                     Speaker speaker)>;

// One simulated dialogue per episode. reset() opens with the agent WELCOME
// and the user's first act; each step() realizes the agent action, updates
// the tracker, gets the simulator's answer (in nlu mode rendered to text
// and parsed back) and updates the tracker again.
//
// The episode ends when the user accepts (the agent then says BYE), either
// side says BYE (the simulated user's BYE counts even when the NLU misses
// it), the tracker raises StateUpdateError, or turn_count
// reaches max_turns. Reward per step is per_turn, plus on the final step
// exactly one of accepted / none_accepted / no_recommendation /
// tracker_exception.
class DialogueEnvironment : public policy::Environment {
 public:
  // nlu mode needs an NLU engine and a user grammar; templates are optional
  // (agent text falls back to the act description).
  DialogueEnvironment(std::shared_ptr<const Catalog> catalog, EnvConfig cfg,
                      std::shared_ptr<const nlu::NluEngine> nlu = nullptr,
                      std::shared_ptr<const nlu::Grammar> grammar = nullptr,
                      std::shared_ptr<const NlgTemplateTable> templates = nullptr);

  std::size_t observation_size() const override { return moviebot::observation_size(cfg_.encoder); }
  std::size_t num_actions() const override { return policy::kNumActions; }
  std::vector<double> reset(std::uint64_t seed) override;
  policy::StepResult step(std::size_t action) override;

  void set_fault_hook(FaultHook hook) { fault_ = std::move(hook); }

  bool active() const { return active_; }
  const DialogueState& state() const { return state_; }
  const EpisodeLog& log() const { return log_; }
  const AgendaSimulator& simulator() const { return sim_; }
  const EnvConfig& config() const { return cfg_; }
  std::vector<double> observation() const;

 private:
  void apply(const DialogueAct& act, Speaker speaker, std::string text);
  std::string agent_text(const DialogueAct& act);

  std::shared_ptr<const Catalog> catalog_;
  EnvConfig cfg_;
  std::shared_ptr<const nlu::NluEngine> nlu_;
  std::shared_ptr<const nlu::Grammar> grammar_;
  std::shared_ptr<const NlgTemplateTable> templates_;
  AgendaSimulator sim_;
  FaultHook fault_;
  Rng text_rng_;
  DialogueState state_;
  DialogueAct last_user_act_;
  EpisodeLog log_;
  bool active_ = false;
};

}  // namespace moviebot::sim
