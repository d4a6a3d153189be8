#include <doctest.h>

#include <cmath>
#include <array>
#include <fstream>
#include <set>

#include "../common/chain_mdp.hpp"
#include "moviebot/policy/policies.hpp"
#include "moviebot/policy/replay.hpp"
#include "moviebot/policy/rl.hpp"
#include "test_support.hpp"

using namespace moviebot;
using namespace moviebot::policy;
using moviebot::testing::ChainMdp;

TEST_CASE("replay buffer stays within capacity") {
  ReplayBuffer buf(5);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), EmptyListError);
  for (int i = 0; i < 3; ++i) buf.push({{double(i)}, 0, double(i), {}, false});
  CHECK(buf.size() == 3);
  for (int i = 3; i < 12; ++i) buf.push({{double(i)}, 0, double(i), {}, false});
  CHECK(buf.size() == 5);
  // the five most recent survive
  std::set<double> kept;
  for (std::size_t i = 0; i < buf.size(); ++i) kept.insert(buf[i].reward);
  CHECK(kept == std::set<double>{7, 8, 9, 10, 11});
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
}

TEST_CASE("replay sampling is uniform") {
  ReplayBuffer buf(4);
  for (int i = 0; i < 4; ++i) buf.push({{}, 0, 0, {}, false});
  Rng rng(9);
  std::array<int, 4> hits{};
  const int n = 40000;
  for (auto i : buf.sample(n, rng)) ++hits[i];
  for (int h : hits) CHECK(std::fabs(h / double(n) - 0.25) < 0.01);
}

TEST_CASE("epsilon schedule") {
  TrainConfig cfg;
  const std::size_t total = 1000;
  CHECK(epsilon_at(0, total, cfg) == 1.0);
  CHECK(epsilon_at(250, total, cfg) == doctest::Approx(0.525));
  CHECK(epsilon_at(500, total, cfg) == 0.05);
  CHECK(epsilon_at(999, total, cfg) == 0.05);
  double prev = 2;
  for (std::size_t s = 0; s < total; ++s) {
    const double e = epsilon_at(s, total, cfg);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.gamma = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.learning_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.episodes = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("softmax and entropy") {
  std::vector<double> zeros(9, 0.0);
  auto p = stable_softmax(zeros);
  CHECK(entropy(p) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> z(9);
    for (auto& v : z) v = rng.uniform(-100, 100);
    auto q = stable_softmax(z);
    double s = 0;
    for (double v : q) s += v;
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
  zeros[3] = std::nan("");
  CHECK_THROWS_AS(stable_softmax(zeros), NumericalError);
  zeros[3] = INFINITY;
  CHECK_THROWS_AS(stable_softmax(zeros), NumericalError);
}

TEST_CASE("value iteration oracle for the chain") {
  auto q = moviebot::testing::chain_q_star(0.9);
  CHECK(q[0][0] == doctest::Approx(0.9));
  CHECK(q[1][0] == doctest::Approx(1.0));
  CHECK(q[1][1] == doctest::Approx(0.9));
  CHECK(q[0][1] == doctest::Approx(0.81));
}

TEST_CASE("dqn learns the chain Q values") {
  const auto q_star = moviebot::testing::chain_q_star(0.9);
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ChainMdp env;
    auto res = dqn_train(env, moviebot::testing::chain_dqn_config(seed));
    CHECK(res.env_steps <= 5000);
    auto q0 = res.net.forward(ChainMdp::one_hot(0));
    auto q1 = res.net.forward(ChainMdp::one_hot(1));
    const bool ok = argmax(q0) == 0 && argmax(q1) == 0 &&
                    std::fabs(q0[0] - q_star[0][0]) <= 0.05 &&
                    std::fabs(q1[0] - q_star[1][0]) <= 0.05;
    good += ok;
  }
  CHECK(good >= 19);
}

TEST_CASE("dqn training is reproducible") {
  ChainMdp a, b;
  auto cfg = moviebot::testing::chain_dqn_config(3);
  cfg.max_steps = 600;
  auto r1 = dqn_train(a, cfg);
  auto r2 = dqn_train(b, cfg);
  CHECK(r1.net == r2.net);
  REQUIRE(r1.curve.size() == r2.curve.size());
  for (std::size_t i = 0; i < r1.curve.size(); ++i) {
    CHECK(r1.curve[i].reward == r2.curve[i].reward);
    CHECK(r1.curve[i].turns == r2.curve[i].turns);
    CHECK(r1.curve[i].epsilon == r2.curve[i].epsilon);
  }
  cfg.seed = 4;
  ChainMdp c;
  CHECK_FALSE(dqn_train(c, cfg).net == r1.net);
}

TEST_CASE("target network sync period") {
  ChainMdp env;
  auto cfg = moviebot::testing::chain_dqn_config(2);
  cfg.max_steps = 400;
  cfg.target_sync = 25;
  int syncs = 0;
  bool equal = true;
  auto res = dqn_train(env, cfg, [&](const Mlp& online, const Mlp& target) {
    ++syncs;
    equal = equal && online == target;
  });
  CHECK(res.env_steps == 400);
  // one gradient step per env step once the buffer holds a batch
  CHECK(res.grad_steps == 400 - cfg.batch_size + 1);
  CHECK(syncs == static_cast<int>(res.grad_steps / 25));
  CHECK(equal);
}

TEST_CASE("a2c greedy policy advances on the chain") {
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ChainMdp env;
    TrainConfig cfg;
    cfg.gamma = 0.9;
    cfg.learning_rate = 0.01;
    cfg.max_steps = 2000;
    cfg.hidden = {16, 16};
    cfg.reward_scale = 1.0;
    cfg.seed = seed;
    auto res = a2c_train(env, cfg);
    auto o0 = res.net.forward(ChainMdp::one_hot(0));
    auto o1 = res.net.forward(ChainMdp::one_hot(1));
    good += argmax(std::span(o0).first(2)) == 0 && argmax(std::span(o1).first(2)) == 0;
  }
  CHECK(good >= 18);
}

TEST_CASE("rule policy cascade") {
  DialogueState s;
  CHECK(rule_policy_next(s) == AgentAction::kElicitGenre);
  s = update_state(s, make_user_act(UserIntent::kHi), Speaker::kUser);
  CHECK(rule_policy_next(s) == AgentAction::kElicitGenre);
  s = update_state(s, make_user_act(UserIntent::kReveal, {{Slot::kGenre, "comedy"}}),
                   Speaker::kUser);
  CHECK(rule_policy_next(s) == AgentAction::kRecommend);
  auto rec = make_agent_act(AgentIntent::kRecommend);
  rec.item_id = "m1";
  s = update_state(s, rec, Speaker::kAgent);
  // outstanding recommendation, genre filled: ask for the next slot
  CHECK(rule_policy_next(s) == AgentAction::kElicitActor);
  auto rej = update_state(s, make_user_act(UserIntent::kReject), Speaker::kUser);
  CHECK(rule_policy_next(rej) == AgentAction::kContinueRec);
  auto inq = make_user_act(UserIntent::kInquire);
  inq.requested = {Slot::kDirector};
  CHECK(rule_policy_next(update_state(s, inq, Speaker::kUser)) == AgentAction::kInform);
  auto acc = update_state(s, make_user_act(UserIntent::kAccept), Speaker::kUser);
  CHECK(rule_policy_next(acc) == AgentAction::kBye);
  DialogueState late;
  late.turn_count = kDefaultMaxTurns;
  late.is_first_turn = false;
  late.frame[index_of(Slot::kGenre)].push_back({"drama", 1});
  CHECK(rule_policy_next(late) == AgentAction::kBye);
}

TEST_CASE("learned policy acting") {
  LearnedPolicy zero(LearnedKind::kDqn, EncoderKind::kBasic, Mlp({10, 4, 9}));
  DialogueState s;
  CHECK(zero.act(s) == AgentAction::kElicitGenre);
  CHECK_THROWS_AS(zero.act_observation(std::vector<double>(30)), DimensionError);
  // Q = bias only: [1,5,3,0...] picks action 1
  Mlp net({10, 9});
  const auto b = net.bias_offset(0);
  net.params()[b + 0] = 1;
  net.params()[b + 1] = 5;
  net.params()[b + 2] = 3;
  LearnedPolicy q(LearnedKind::kDqn, EncoderKind::kBasic, net);
  CHECK(q.act(s) == AgentAction::kElicitActor);
  CHECK_THROWS_AS(LearnedPolicy(LearnedKind::kA2c, EncoderKind::kBasic, Mlp({10, 9})),
                  DimensionError);
  CHECK_THROWS_AS(LearnedPolicy(LearnedKind::kDqn, EncoderKind::kWithIntents, Mlp({10, 9})),
                  DimensionError);
}

TEST_CASE("policy files round trip") {
  testsupport::TempDir dir("pol");
  Rng rng(12);
  LearnedPolicy p(LearnedKind::kA2c, EncoderKind::kWithIntents,
                  Mlp::he_uniform({30, 64, 64, 10}, rng), 25);
  const auto path = dir.file("a2c.pol");
  save_policy(path, p);
  auto back = load_policy(path);
  CHECK(back.kind() == LearnedKind::kA2c);
  CHECK(back.encoder() == EncoderKind::kWithIntents);
  CHECK(back.max_turns() == 25);
  CHECK(back.net() == p.net());

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  CHECK(bytes.substr(0, 4) == "POL1");
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 5);
  CHECK_THROWS_AS(load_policy(path), ParseError);
  std::ofstream(path, std::ios::binary) << "XXXX" << bytes.substr(4);
  CHECK_THROWS_AS(load_policy(path), ParseError);
}

TEST_CASE("random policy reseeds per episode") {
  RandomPolicy a, b(123);
  DialogueState s;
  a.begin_episode(5);
  b.begin_episode(5);
  for (int i = 0; i < 20; ++i) CHECK(a.act(s) == b.act(s));
}

TEST_CASE("training curve csv") {
  testsupport::TempDir dir("curve");
  const auto path = dir.file("curve.csv");
  write_curve_csv(path, {{0, -12.5, false, 7, 1.0}, {1, 88, true, 3, 0.5}});
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), {});
  CHECK(all ==
        "episode,reward,success_flag,turns,epsilon\n0,-12.5,0,7,1.000000\n1,88,1,3,0.500000\n");
}
