#include "moviebot/policy/actions.hpp"

#include <set>

#include "moviebot/recsys/recommender.hpp"
#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot::policy {

AgentAction action_from_index(std::size_t i) {
  if (i >= kNumActions) throw DimensionError("action index " + std::to_string(i) + " out of range");
  return kAllActions[i];
}

std::string_view name(AgentAction a) {
  switch (a) {
    case AgentAction::kElicitGenre: return "ELICIT(genre)";
    case AgentAction::kElicitActor: return "ELICIT(actor)";
    case AgentAction::kElicitDirector: return "ELICIT(director)";
    case AgentAction::kElicitKeyword: return "ELICIT(keyword)";
    case AgentAction::kRecommend: return "RECOMMEND";
    case AgentAction::kInform: return "INFORM";
    case AgentAction::kContinueRec: return "CONTINUE_REC";
    case AgentAction::kRestart: return "RESTART";
    case AgentAction::kBye: return "BYE";
  }
  return "?";
}

namespace {

DialogueAct elicit(Slot s) {
  auto act = make_agent_act(AgentIntent::kElicit);
  act.requested = {s};
  return act;
}

SlotValue value(Slot s, std::string v) { return SlotValue{s, std::move(v), +1, std::nullopt}; }

std::string list_phrase(const std::vector<std::string>& xs) {
  if (xs.size() <= 1) return xs.empty() ? "" : xs[0];
  return join_range(xs, 0, xs.size() - 1, ", ") + " and " + xs.back();
}

DialogueAct recommend_act(const DialogueState& state, const Catalog& catalog,
                          const std::vector<std::string>& exclude_ids) {
  const std::set<std::string> exclude(exclude_ids.begin(), exclude_ids.end());
  const auto items = recommend(catalog, state.frame, exclude, 1);
  if (items.empty()) return make_agent_act(AgentIntent::kNoResults);
  const Item& item = *items.front();
  auto act = make_agent_act(AgentIntent::kRecommend,
                            {value(Slot::kTitle, item.title),
                             value(Slot::kYear, std::to_string(item.year))});
  act.item_id = item.id;
  return act;
}

std::optional<std::string> item_value(const Item& item, Slot s) {
  switch (s) {
    case Slot::kGenre: return item.genres.empty() ? std::nullopt : std::optional(list_phrase(item.genres));
    case Slot::kActor: return item.actors.empty() ? std::nullopt : std::optional(list_phrase(item.actors));
    case Slot::kDirector: return item.director.empty() ? std::nullopt : std::optional(item.director);
    case Slot::kKeyword:
      return item.keywords.empty() ? std::nullopt : std::optional(list_phrase(item.keywords));
    case Slot::kTitle: return item.title;
    case Slot::kYear: return std::to_string(item.year);
  }
  return std::nullopt;
}

DialogueAct inform_act(const DialogueState& state, const Catalog& catalog,
                       const DialogueAct* last_user_act) {
  auto act = make_agent_act(AgentIntent::kInform);
  const auto* rec = state.last_recommendation();
  if (!rec) return act;
  const Item* item = catalog.find(rec->item_id);
  act.item_id = rec->item_id;
  if (!item) return act;
  std::vector<Slot> asked;
  if (last_user_act && last_user_act->is(UserIntent::kInquire)) asked = last_user_act->requested;
  if (asked.empty()) asked = {Slot::kGenre, Slot::kDirector};
  act.slot_values.push_back(value(Slot::kTitle, item->title));
  act.slot_values.push_back(value(Slot::kYear, std::to_string(item->year)));
  for (auto s : asked) {
    if (s == Slot::kTitle || s == Slot::kYear) continue;
    if (auto v = item_value(*item, s)) act.slot_values.push_back(value(s, *v));
  }
  act.requested = {asked.front()};
  return act;
}

}  // namespace

DialogueAct realize_action(AgentAction action, const DialogueState& state, const Catalog& catalog,
                           const DialogueAct* last_user_act) {
  switch (action) {
    case AgentAction::kElicitGenre: return elicit(Slot::kGenre);
    case AgentAction::kElicitActor: return elicit(Slot::kActor);
    case AgentAction::kElicitDirector: return elicit(Slot::kDirector);
    case AgentAction::kElicitKeyword: return elicit(Slot::kKeyword);
    case AgentAction::kRecommend: return recommend_act(state, catalog, state.rejected_ids());
    case AgentAction::kContinueRec: return recommend_act(state, catalog, state.recommended_ids());
    case AgentAction::kInform: return inform_act(state, catalog, last_user_act);
    case AgentAction::kRestart: return make_agent_act(AgentIntent::kRestartAck);
    case AgentAction::kBye: return make_agent_act(AgentIntent::kBye);
  }
  throw DimensionError("unknown action");
}

}  // namespace moviebot::policy
