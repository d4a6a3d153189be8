#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/recsys/catalog.hpp"
#include "moviebot/util/rng.hpp"

namespace moviebot::sim {

struct Constraint {
  Slot slot = Slot::kGenre;
  std::string value;  // normalized, as the tracker and NLU see it
  int polarity = +1;
  bool operator==(const Constraint&) const = default;
};

struct SimulatorConfig {
  int patience = 30;       // user utterances before the user gives up
  double p_comply = 0.9;   // answer an ELICIT directly
  double p_remove = 0.05;  // retract a revealed preference instead of answering

  void validate() const;  // ConfigError
};

struct UserProfile {
  std::string seed_item;
  std::vector<Constraint> constraints;  // genre first, then actor, director
  std::set<std::string> target_items;
  int patience = 30;
  double p_comply = 0.9;
  double p_remove = 0.05;

  bool has(Slot slot) const;
  const Constraint* find(Slot slot) const;
};

// Seed item uniform over the catalog; genre always, actor and director each
// with probability 1/2, one value per slot drawn from the seed item. The
// target set holds every item matching all positive constraints and none of
// the negative ones, so it always contains the seed item.
UserProfile sample_profile(const Catalog& catalog, Rng& rng, const SimulatorConfig& cfg = {});

// Agenda-based user. The agenda is a stack: HI on top, the REVEAL acts for
// the constraints in shuffled order, BYE at the bottom.
//
// Response to an agent act, after the turn counter:
//   user utterances reach patience       BYE
//   p_remove roll with something revealed REMOVE_PREFERENCES of one revealed
//                                         pair; its REVEAL goes back on top
//   ELICIT(s), p_comply roll, s in profile REVEAL(s); its agenda entry is dropped
//   RECOMMEND(item)                      ACCEPT if item is a target, else REJECT
//   RESTART_ACK                          forget revealed pairs, re-push REVEALs
//   anything else                        pop the agenda (BYE when empty)
class AgendaSimulator {
 public:
  AgendaSimulator(std::shared_ptr<const Catalog> catalog, SimulatorConfig cfg = {});

  // New profile and agenda from the seed; returns the opening act (HI).
  DialogueAct start(std::uint64_t seed);
  // InactiveEpisodeError before start() or after the user said BYE.
  DialogueAct respond(const DialogueAct& agent_act);

  bool active() const { return active_; }
  const UserProfile& profile() const { return profile_; }
  // Bottom to top.
  const std::vector<DialogueAct>& agenda() const { return agenda_; }
  int user_turns() const { return user_turns_; }
  const std::vector<Constraint>& revealed() const { return revealed_; }

 private:
  DialogueAct pop();
  DialogueAct reveal(const Constraint& c);
  DialogueAct finish(DialogueAct act);
  void push_reveals(std::vector<Constraint> cs);

  std::shared_ptr<const Catalog> catalog_;
  SimulatorConfig cfg_;
  Rng rng_;
  UserProfile profile_;
  std::vector<DialogueAct> agenda_;
  std::vector<Constraint> revealed_;
  int user_turns_ = 0;
  bool active_ = false;
};

DialogueAct reveal_act(const Constraint& c);

}  // namespace moviebot::sim
