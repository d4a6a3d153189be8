#include "moviebot/sim/simulator.hpp"

#include <algorithm>

#include "moviebot/recsys/recommender.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::sim {

void SimulatorConfig::validate() const {
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (p_comply < 0 || p_comply > 1 || p_remove < 0 || p_remove > 1) {
    throw ConfigError("simulator probabilities must lie in [0, 1]");
  }
}

bool UserProfile::has(Slot slot) const { return find(slot) != nullptr; }

const Constraint* UserProfile::find(Slot slot) const {
  for (const auto& c : constraints) {
    if (c.slot == slot) return &c;
  }
  return nullptr;
}

UserProfile sample_profile(const Catalog& catalog, Rng& rng, const SimulatorConfig& cfg) {
  if (catalog.empty()) throw EmptyCatalogError("cannot sample a profile from an empty catalog");
  cfg.validate();
  UserProfile p;
  p.patience = cfg.patience;
  p.p_comply = cfg.p_comply;
  p.p_remove = cfg.p_remove;
  const std::size_t pos = rng.index(catalog.size());
  const auto& norm = catalog.normalized(pos);
  p.seed_item = catalog.items()[pos].id;

  auto pick = [&](const std::set<std::string>& values) {
    std::vector<std::string> v(values.begin(), values.end());
    return v[rng.index(v.size())];
  };
  if (norm.genres.empty()) {
    throw EmptyCatalogError("seed item " + p.seed_item + " has no genre");
  }
  p.constraints.push_back({Slot::kGenre, pick(norm.genres), +1});
  // Both rolls happen unconditionally so the stream does not depend on
  // which attributes the item has.
  const bool want_actor = rng.bernoulli(0.5);
  const bool want_director = rng.bernoulli(0.5);
  if (want_actor && !norm.actors.empty()) {
    p.constraints.push_back({Slot::kActor, pick(norm.actors), +1});
  }
  if (want_director && !norm.director.empty()) {
    p.constraints.push_back({Slot::kDirector, norm.director, +1});
  }

  for (std::size_t i = 0; i < catalog.size(); ++i) {
    bool ok = true;
    for (const auto& c : p.constraints) {
      const bool m = item_matches(catalog, i, c.slot, c.value);
      if (m != (c.polarity > 0)) ok = false;
    }
    if (ok) p.target_items.insert(catalog.items()[i].id);
  }
  return p;
}

DialogueAct reveal_act(const Constraint& c) {
  return make_user_act(UserIntent::kReveal, {{c.slot, c.value, c.polarity, std::nullopt}});
}

AgendaSimulator::AgendaSimulator(std::shared_ptr<const Catalog> catalog, SimulatorConfig cfg)
    : catalog_(std::move(catalog)), cfg_(cfg) {
  cfg_.validate();
  if (!catalog_ || catalog_->empty()) throw EmptyCatalogError("simulator needs a catalog");
}

void AgendaSimulator::push_reveals(std::vector<Constraint> cs) {
  rng_.shuffle(cs);
  for (const auto& c : cs) agenda_.push_back(reveal_act(c));
}

DialogueAct AgendaSimulator::start(std::uint64_t seed) {
  rng_ = Rng(seed);
  profile_ = sample_profile(*catalog_, rng_, cfg_);
  agenda_.clear();
  revealed_.clear();
  agenda_.push_back(make_user_act(UserIntent::kBye));
  push_reveals(profile_.constraints);
  agenda_.push_back(make_user_act(UserIntent::kHi));
  user_turns_ = 0;
  active_ = true;
  return pop();
}

DialogueAct AgendaSimulator::finish(DialogueAct act) {
  ++user_turns_;
  if (act.is(UserIntent::kBye)) active_ = false;
  return act;
}

DialogueAct AgendaSimulator::reveal(const Constraint& c) {
  if (std::find(revealed_.begin(), revealed_.end(), c) == revealed_.end()) revealed_.push_back(c);
  std::erase_if(agenda_, [&](const DialogueAct& a) {
    return a.is(UserIntent::kReveal) && a.slot_values.front().slot == c.slot &&
           a.slot_values.front().value == c.value;
  });
  return finish(reveal_act(c));
}

DialogueAct AgendaSimulator::pop() {
  if (agenda_.empty()) return finish(make_user_act(UserIntent::kBye));
  DialogueAct act = agenda_.back();
  agenda_.pop_back();
  if (act.is(UserIntent::kReveal)) {
    const auto& sv = act.slot_values.front();
    return reveal({sv.slot, sv.value, sv.polarity});
  }
  return finish(std::move(act));
}

DialogueAct AgendaSimulator::respond(const DialogueAct& agent_act) {
  if (!active_) throw InactiveEpisodeError("simulated user is not in an active episode");
  if (user_turns_ + 1 >= profile_.patience) return finish(make_user_act(UserIntent::kBye));

  if (agent_act.is(AgentIntent::kRestartAck)) {
    revealed_.clear();
    std::erase_if(agenda_, [](const DialogueAct& a) { return a.is(UserIntent::kReveal); });
    push_reveals(profile_.constraints);
    return pop();
  }
  if (!revealed_.empty() && rng_.bernoulli(profile_.p_remove)) {
    const std::size_t i = rng_.index(revealed_.size());
    const Constraint c = revealed_[i];
    revealed_.erase(revealed_.begin() + static_cast<std::ptrdiff_t>(i));
    agenda_.push_back(reveal_act(c));
    return finish(make_user_act(UserIntent::kRemovePreferences,
                                {{c.slot, c.value, c.polarity, std::nullopt}}));
  }
  if (agent_act.is(AgentIntent::kElicit) && !agent_act.requested.empty()) {
    const Slot s = agent_act.requested.front();
    if (rng_.bernoulli(profile_.p_comply)) {
      if (const auto* c = profile_.find(s)) return reveal(*c);
    }
    return pop();
  }
  if (agent_act.is(AgentIntent::kRecommend) && agent_act.item_id) {
    const bool hit = profile_.target_items.count(*agent_act.item_id) > 0;
    return finish(make_user_act(hit ? UserIntent::kAccept : UserIntent::kReject));
  }
  return pop();
}

}  // namespace moviebot::sim
