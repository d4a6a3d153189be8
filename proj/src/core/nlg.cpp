#include "moviebot/core/nlg.hpp"

#include <sstream>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/rng.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot {

NlgTemplateTable NlgTemplateTable::load(const std::string& path) {
  return parse(read_file(path));
}

NlgTemplateTable NlgTemplateTable::parse(const std::string& content) {
  NlgTemplateTable table;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError("expected 3 TAB-separated fields", lineno);
    auto intent = parse_agent_intent(fields[0]);
    if (!intent) throw ParseError("unknown agent intent '" + fields[0] + "'", lineno);
    std::optional<Slot> slot;
    if (fields[1] != "-") {
      slot = parse_slot(fields[1]);
      if (!slot) throw ParseError("unknown slot '" + fields[1] + "'", lineno);
    }
    table.add(*intent, slot, fields[2]);
  }
  return table;
}

void NlgTemplateTable::add(AgentIntent intent, std::optional<Slot> slot, std::string text) {
  templates_[{intent, slot}].push_back(std::move(text));
}

const std::vector<std::string>* NlgTemplateTable::find(AgentIntent intent,
                                                       std::optional<Slot> slot) const {
  auto it = templates_.find({intent, slot});
  return it == templates_.end() ? nullptr : &it->second;
}

void NlgTemplateTable::validate() const {
  for (auto intent : kAllAgentIntents) {
    bool any = false;
    for (const auto& [key, list] : templates_) {
      if (key.first == intent && !list.empty()) any = true;
    }
    if (!any) {
      throw MissingTemplateError("no template for agent intent " +
                                 std::string(name(intent)));
    }
  }
}

std::size_t NlgTemplateTable::size() const {
  std::size_t n = 0;
  for (const auto& [key, list] : templates_) n += list.size();
  return n;
}

namespace {

std::optional<Slot> template_slot(const DialogueAct& act) {
  if (!act.requested.empty()) return act.requested.front();
  for (const auto& sv : act.slot_values) {
    if (sv.slot != Slot::kTitle && sv.slot != Slot::kYear) return sv.slot;
  }
  return std::nullopt;
}

const SlotValue* find_slot(const DialogueAct& act, Slot slot) {
  for (const auto& sv : act.slot_values) {
    if (sv.slot == slot) return &sv;
  }
  return nullptr;
}

std::optional<std::string> resolve(const std::string& placeholder, const DialogueAct& act) {
  if (placeholder == "title") {
    if (const auto* sv = find_slot(act, Slot::kTitle)) return sv->value;
  } else if (placeholder == "year") {
    if (const auto* sv = find_slot(act, Slot::kYear)) return sv->value;
  } else if (placeholder == "count") {
    if (act.count) return std::to_string(*act.count);
  } else if (placeholder == "slot") {
    if (auto s = template_slot(act)) return std::string(name(*s));
  } else if (placeholder == "value") {
    for (const auto& sv : act.slot_values) {
      if (sv.slot != Slot::kTitle && sv.slot != Slot::kYear) return sv.value;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string fill_template(const std::string& text, const DialogueAct& act) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      out.push_back(text[i++]);
      continue;
    }
    auto close = text.find('}', i);
    if (close == std::string::npos) {
      throw UnresolvedPlaceholderError("unterminated placeholder in '" + text + "'");
    }
    auto key = text.substr(i + 1, close - i - 1);
    auto value = resolve(key, act);
    if (!value) {
      throw UnresolvedPlaceholderError("cannot resolve {" + key + "} for " + describe(act));
    }
    out += *value;
    i = close + 1;
  }
  return out;
}

std::string generate_response(const DialogueAct& act, const DialogueState& /*state*/,
                              const NlgTemplateTable& templates, std::uint64_t rng_seed) {
  const auto* agent = std::get_if<AgentIntent>(&act.intent);
  if (!agent) throw MissingTemplateError("generate_response needs an agent act");
  const auto slot = template_slot(act);
  const auto* candidates = slot ? templates.find(*agent, slot) : nullptr;
  if (!candidates || candidates->empty()) candidates = templates.find(*agent, std::nullopt);
  if (!candidates || candidates->empty()) {
    throw MissingTemplateError("no template for " + describe(act));
  }
  Rng rng(rng_seed);
  return fill_template((*candidates)[rng.index(candidates->size())], act);
}

}  // namespace moviebot
