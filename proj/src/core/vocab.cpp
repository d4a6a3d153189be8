#include "moviebot/core/vocab.hpp"

#include <sstream>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot {
namespace {

constexpr std::array<std::string_view, kNumUserIntents> kUserNames = {
    "REVEAL",  "INQUIRE", "REMOVE_PREFERENCES", "ACCEPT",      "REJECT", "CONTINUE",
    "RESTART", "HI",      "BYE",                "ACKNOWLEDGE", "DENY",   "UNK"};
constexpr std::array<std::string_view, kNumAgentIntents> kAgentNames = {
    "WELCOME",   "ELICIT",        "RECOMMEND",   "INFORM",
    "NO_RESULTS", "COUNT_RESULTS", "RESTART_ACK", "BYE"};
constexpr std::array<std::string_view, kNumSlots> kSlotNames = {
    "genre", "director", "actor", "keyword", "title", "year"};

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view name(UserIntent intent) { return kUserNames[index_of(intent)]; }
std::string_view name(AgentIntent intent) { return kAgentNames[index_of(intent)]; }
std::string_view name(Slot slot) { return kSlotNames[index_of(slot)]; }

std::string name(const Intent& intent) {
  return std::visit([](auto i) { return std::string(name(i)); }, intent);
}

std::optional<UserIntent> parse_user_intent(std::string_view s) {
  return lookup<UserIntent>(kUserNames, s);
}
std::optional<AgentIntent> parse_agent_intent(std::string_view s) {
  return lookup<AgentIntent>(kAgentNames, s);
}
std::optional<Slot> parse_slot(std::string_view s) { return lookup<Slot>(kSlotNames, s); }

Speaker speaker_of(const Intent& intent) {
  return std::holds_alternative<UserIntent>(intent) ? Speaker::kUser : Speaker::kAgent;
}

SlotConstraint slot_constraint(UserIntent intent) {
  switch (intent) {
    case UserIntent::kReveal:
    case UserIntent::kRemovePreferences:
      return SlotConstraint::kSlotRequired;
    case UserIntent::kInquire:
    case UserIntent::kUnk:
      return SlotConstraint::kUnconstrained;
    default:
      return SlotConstraint::kSlotFree;
  }
}

void verify_vocabulary_file(const std::string& path) {
  bool saw_version = false;
  bool saw_user = false, saw_agent = false, saw_slot = false;
  std::size_t lineno = 0;
  for (const auto& raw : read_lines(path)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream in{std::string(line)};
    std::string key;
    in >> key;
    std::vector<std::string> symbols;
    for (std::string s; in >> s;) symbols.push_back(s);
    auto check = [&](auto names, const char* what) {
      if (symbols.size() != names.size()) {
        throw VocabularyError(std::string(what) + " vocabulary has " +
                              std::to_string(symbols.size()) + " symbols, build expects " +
                              std::to_string(names.size()));
      }
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (symbols[i] != names[i]) {
          throw VocabularyError(std::string(what) + " symbol " + std::to_string(i) +
                                " is " + symbols[i] + ", build expects " +
                                std::string(names[i]));
        }
      }
    };
    if (key == "version") {
      if (symbols.size() != 1 || symbols[0] != std::to_string(kVocabularyVersion)) {
        throw VocabularyError("unsupported vocabulary version in " + path);
      }
      saw_version = true;
    } else if (key == "user") {
      check(kUserNames, "user intent");
      saw_user = true;
    } else if (key == "agent") {
      check(kAgentNames, "agent intent");
      saw_agent = true;
    } else if (key == "slot") {
      check(kSlotNames, "slot");
      saw_slot = true;
    } else {
      throw ParseError("unknown vocabulary key '" + key + "'", lineno);
    }
  }
  if (!saw_version || !saw_user || !saw_agent || !saw_slot) {
    throw VocabularyError("vocabulary file " + path + " is incomplete");
  }
}

}  // namespace moviebot
