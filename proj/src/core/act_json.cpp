#include "moviebot/core/act_json.hpp"

#include "moviebot/util/errors.hpp"

namespace moviebot {

using nlohmann::json;

json act_to_json(const DialogueAct& act) {
  json j;
  j["intent"] = name(act.intent);
  j["speaker"] = speaker_of(act.intent) == Speaker::kUser ? "user" : "agent";
  json svs = json::array();
  for (const auto& sv : act.slot_values) {
    json s = {{"slot", name(sv.slot)}, {"value", sv.value}, {"polarity", sv.polarity}};
    if (sv.span) s["span"] = {sv.span->begin, sv.span->end};
    svs.push_back(std::move(s));
  }
  j["slot_values"] = std::move(svs);
  if (!act.requested.empty()) {
    json r = json::array();
    for (auto s : act.requested) r.push_back(name(s));
    j["requested"] = std::move(r);
  }
  if (act.item_id) j["item_id"] = *act.item_id;
  if (act.count) j["count"] = *act.count;
  return j;
}

DialogueAct act_from_json(const json& j) {
  try {
    DialogueAct act;
    const auto intent = j.at("intent").get<std::string>();
    const auto speaker = j.value("speaker", std::string("user"));
    if (speaker == "agent") {
      auto i = parse_agent_intent(intent);
      if (!i) throw ParseError("unknown agent intent '" + intent + "'");
      act.intent = *i;
    } else {
      auto i = parse_user_intent(intent);
      if (!i) throw ParseError("unknown user intent '" + intent + "'");
      act.intent = *i;
    }
    auto slot_of = [](const std::string& s) {
      auto slot = parse_slot(s);
      if (!slot) throw ParseError("unknown slot '" + s + "'");
      return *slot;
    };
    for (const auto& s : j.value("slot_values", json::array())) {
      SlotValue sv;
      sv.slot = slot_of(s.at("slot").get<std::string>());
      sv.value = s.at("value").get<std::string>();
      sv.polarity = s.value("polarity", 1);
      if (s.contains("span")) {
        sv.span = TokenSpan{s["span"].at(0).get<std::size_t>(), s["span"].at(1).get<std::size_t>()};
      }
      act.slot_values.push_back(std::move(sv));
    }
    for (const auto& r : j.value("requested", json::array())) {
      act.requested.push_back(slot_of(r.get<std::string>()));
    }
    if (j.contains("item_id")) act.item_id = j["item_id"].get<std::string>();
    if (j.contains("count")) act.count = j["count"].get<int>();
    return act;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed dialogue act: ") + e.what());
  }
}

json utterance_to_json(const Utterance& u) {
  json acts = json::array();
  for (const auto& a : u.acts) acts.push_back(act_to_json(a));
  return {{"speaker", u.speaker == Speaker::kUser ? "user" : "agent"},
          {"turn", u.turn_index},
          {"text", u.text},
          {"acts", std::move(acts)}};
}

}  // namespace moviebot
