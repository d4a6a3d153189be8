#include "moviebot/policy/policies.hpp"

#include <fstream>

#include "moviebot/util/binary_io.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::policy {

AgentAction rule_policy_next(const DialogueState& state, int max_turns) {
  if (state.turn_count >= max_turns || state.accepted) return AgentAction::kBye;
  if (state.is_first_turn) return AgentAction::kElicitGenre;
  if (state.last_user_intent == UserIntent::kInquire && !state.recommended_items.empty()) {
    return AgentAction::kInform;
  }
  if (state.last_recommendation_rejected()) return AgentAction::kContinueRec;
  if (should_make_offer(state)) return AgentAction::kRecommend;
  constexpr std::pair<Slot, AgentAction> order[] = {
      {Slot::kGenre, AgentAction::kElicitGenre},
      {Slot::kActor, AgentAction::kElicitActor},
      {Slot::kDirector, AgentAction::kElicitDirector},
      {Slot::kKeyword, AgentAction::kElicitKeyword}};
  for (auto [slot, action] : order) {
    if (state.frame[index_of(slot)].empty()) return action;
  }
  return AgentAction::kRecommend;
}

AgentAction RandomPolicy::act(const DialogueState&) {
  return action_from_index(rng_.index(kNumActions));
}

std::string_view name(LearnedKind k) { return k == LearnedKind::kDqn ? "dqn" : "a2c"; }

LearnedPolicy::LearnedPolicy(LearnedKind kind, EncoderKind encoder, Mlp net, int max_turns)
    : kind_(kind), encoder_(encoder), net_(std::move(net)), max_turns_(max_turns) {
  const std::size_t want_out = kNumActions + (kind_ == LearnedKind::kA2c ? 1 : 0);
  if (net_.input_size() != observation_size(encoder_)) {
    throw DimensionError("policy network input does not match the " +
                         std::string(moviebot::name(encoder_)) + " encoder");
  }
  if (net_.output_size() != want_out) {
    throw DimensionError("policy network has " + std::to_string(net_.output_size()) +
                         " outputs, expected " + std::to_string(want_out));
  }
}

AgentAction LearnedPolicy::act_observation(std::span<const double> obs) const {
  const auto out = net_.forward(obs);
  return action_from_index(argmax(std::span(out).first(kNumActions)));
}

AgentAction LearnedPolicy::act(const DialogueState& state) {
  return act_observation(encode_state(state, encoder_, max_turns_));
}

namespace {
constexpr std::uint32_t kPolicyFormatVersion = 1;
}

void save_policy(const std::string& path, const LearnedPolicy& policy) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StorageError("cannot write policy to " + path);
  const auto& net = policy.net();
  binio::write_magic(out, "POL1");
  binio::write_pod<std::uint32_t>(out, kPolicyFormatVersion);
  binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(policy.kind()));
  binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(policy.encoder()));
  binio::write_pod<std::uint32_t>(out, kActionInventoryVersion);
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(policy.max_turns()));
  binio::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(net.sizes().size()));
  for (auto s : net.sizes()) binio::write_pod<std::uint64_t>(out, s);
  binio::write_pod<std::uint64_t>(out, net.num_params());
  binio::write_doubles(out, net.params());
  if (!out) throw StorageError("failed writing " + path);
}

LearnedPolicy load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open policy file " + path);
  binio::expect_magic(in, "POL1");
  if (binio::read_pod<std::uint32_t>(in) != kPolicyFormatVersion) {
    throw ParseError("unsupported policy format version");
  }
  const auto kind = binio::read_pod<std::uint8_t>(in);
  const auto enc = binio::read_pod<std::uint8_t>(in);
  if (kind > 1 || enc > 1) throw ParseError("unknown policy or encoder kind");
  if (binio::read_pod<std::uint32_t>(in) != kActionInventoryVersion) {
    throw ParseError("policy was trained for a different action inventory");
  }
  const auto max_turns = binio::read_pod<std::uint32_t>(in);
  const auto n_layers = binio::read_pod<std::uint32_t>(in);
  if (n_layers < 2 || n_layers > 64) throw ParseError("implausible layer count");
  std::vector<std::size_t> sizes(n_layers);
  for (auto& s : sizes) {
    s = binio::read_pod<std::uint64_t>(in);
    if (s == 0 || s > (1u << 20)) throw ParseError("implausible layer size");
  }
  Mlp net(sizes);
  if (binio::read_pod<std::uint64_t>(in) != net.num_params()) {
    throw ParseError("parameter count does not match the layer sizes");
  }
  binio::read_doubles(in, net.params());
  return LearnedPolicy(static_cast<LearnedKind>(kind), static_cast<EncoderKind>(enc),
                       std::move(net), static_cast<int>(max_turns));
}

}  // namespace moviebot::policy
