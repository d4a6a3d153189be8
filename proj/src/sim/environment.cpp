#include "moviebot/sim/environment.hpp"

#include "moviebot/util/errors.hpp"

namespace moviebot::sim {

std::string_view name(EnvMode m) { return m == EnvMode::kAnnotation ? "annotation" : "nlu"; }

std::optional<EnvMode> parse_env_mode(std::string_view s) {
  if (s == "annotation") return EnvMode::kAnnotation;
  if (s == "nlu") return EnvMode::kNlu;
  return std::nullopt;
}

DialogueEnvironment::DialogueEnvironment(std::shared_ptr<const Catalog> catalog, EnvConfig cfg,
                                         std::shared_ptr<const nlu::NluEngine> nlu,
                                         std::shared_ptr<const nlu::Grammar> grammar,
                                         std::shared_ptr<const NlgTemplateTable> templates)
    : catalog_(catalog),
      cfg_(cfg),
      nlu_(std::move(nlu)),
      grammar_(std::move(grammar)),
      templates_(std::move(templates)),
      sim_(catalog, cfg.simulator) {
  if (cfg_.max_turns < 1) throw ConfigError("max_turns must be at least 1");
  if (cfg_.mode == EnvMode::kNlu && (!nlu_ || !grammar_)) {
    throw ConfigError("nlu mode needs an NLU engine and a user grammar");
  }
}

std::vector<double> DialogueEnvironment::observation() const {
  return encode_state(state_, cfg_.encoder, cfg_.max_turns);
}

std::string DialogueEnvironment::agent_text(const DialogueAct& act) {
  if (!templates_) return describe(act);
  return generate_response(act, state_, *templates_, text_rng_.next());
}

void DialogueEnvironment::apply(const DialogueAct& act, Speaker speaker, std::string text) {
  if (fault_ && fault_(state_, act, speaker)) {
    throw StateUpdateError("injected tracker fault");
  }
  state_ = update_state(state_, act, speaker);
  log_.transcript.push_back({speaker, std::move(text), {act}, static_cast<int>(log_.transcript.size())});
}

std::vector<double> DialogueEnvironment::reset(std::uint64_t seed) {
  state_ = DialogueState{};
  log_ = EpisodeLog{};
  log_.seed = seed;
  text_rng_ = Rng(mix_seed(seed, 1));
  active_ = true;
  const auto opening = sim_.start(mix_seed(seed, 0));
  // The opening cannot fail on a fresh tracker unless the fault hook says
  // so; that case is reported on the first step.
  try {
    const auto welcome = make_agent_act(AgentIntent::kWelcome);
    apply(welcome, Speaker::kAgent, agent_text(welcome));
    last_user_act_ = opening;
    std::string text = describe(opening);
    if (grammar_) text = nlu::render_user_text(opening, *grammar_, text_rng_);
    apply(cfg_.mode == EnvMode::kNlu ? nlu_->parse(text).act : opening, Speaker::kUser, text);
  } catch (const StateUpdateError& e) {
    log_.tracker_failed = true;
    log_.error = e.what();
  }
  return observation();
}

policy::StepResult DialogueEnvironment::step(std::size_t action) {
  if (!active_) throw InactiveEpisodeError("step() called outside an active episode");
  const auto& rw = cfg_.reward;
  policy::StepResult res;
  res.reward = rw.per_turn;
  bool done = false;

  if (log_.tracker_failed) {
    done = true;
  } else {
    try {
      const auto agent_act = policy::realize_action(policy::action_from_index(action), state_,
                                                    *catalog_, &last_user_act_);
      apply(agent_act, Speaker::kAgent, agent_text(agent_act));
      if (state_.terminated) {
        done = true;
      } else {
        const auto user_act = sim_.respond(agent_act);
        std::string text = describe(user_act);
        if (grammar_) text = nlu::render_user_text(user_act, *grammar_, text_rng_);
        const auto heard = cfg_.mode == EnvMode::kNlu ? nlu_->parse(text).act : user_act;
        apply(heard, Speaker::kUser, text);
        last_user_act_ = heard;
        if (state_.accepted) {
          const auto bye = make_agent_act(AgentIntent::kBye);
          apply(bye, Speaker::kAgent, agent_text(bye));
        }
        // The user may have left even if the NLU did not hear a BYE.
        done = state_.terminated || !sim_.active() || state_.turn_count >= cfg_.max_turns;
      }
    } catch (const StateUpdateError& e) {
      log_.tracker_failed = true;
      log_.error = e.what();
      done = true;
    }
  }

  if (done) {
    active_ = false;
    if (log_.tracker_failed) {
      res.reward += rw.tracker_exception;
    } else if (state_.accepted) {
      res.reward += rw.accepted;
    } else if (!state_.recommended_items.empty()) {
      res.reward += rw.none_accepted;
    } else {
      res.reward += rw.no_recommendation;
    }
    log_.success = state_.accepted && !log_.tracker_failed;
  }
  log_.total_reward += res.reward;
  res.done = done;
  res.success = log_.success;
  res.observation = observation();
  return res;
}

}  // namespace moviebot::sim
