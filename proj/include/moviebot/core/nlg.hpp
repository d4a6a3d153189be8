#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/core/state.hpp"

namespace moviebot {

// Agent-side surface templates keyed by (intent, optional slot).
//
// File format: UTF-8, one record per line, TAB-separated
//   INTENT <TAB> slot-or-"-" <TAB> template text
// '#' starts a comment line. Placeholders: {title} {year} {slot} {count}
// {value}.
class NlgTemplateTable {
 public:
  using Key = std::pair<AgentIntent, std::optional<Slot>>;

  static NlgTemplateTable load(const std::string& path);
  static NlgTemplateTable parse(const std::string& content);

  void add(AgentIntent intent, std::optional<Slot> slot, std::string text);

  // Candidates for the exact key, or nullptr.
  const std::vector<std::string>* find(AgentIntent intent, std::optional<Slot> slot) const;

  // Throws MissingTemplateError naming the first agent intent without a
  // slot-independent template.
  void validate() const;

  std::size_t size() const;

 private:
  std::map<Key, std::vector<std::string>> templates_;
};

// Renders an agent act. The template is chosen uniformly among the
// candidates for (intent, slot), falling back to (intent, -). The slot key
// is the first requested slot, else the first slot value that is neither
// title nor year.
std::string generate_response(const DialogueAct& act, const DialogueState& state,
                              const NlgTemplateTable& templates, std::uint64_t rng_seed);

// Substitutes placeholders of one template. Throws
// UnresolvedPlaceholderError for unknown names or values the act lacks.
std::string fill_template(const std::string& text, const DialogueAct& act);

}  // namespace moviebot
