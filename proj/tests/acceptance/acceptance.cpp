// Acceptance gate: one PASS/FAIL line per criterion, each with its measured
// values and wall time against the limit. Exit status is the number of
// failures.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <thread>

#include "../common/chain_mdp.hpp"
#include "moviebot/cli/cli.hpp"
#include "moviebot/gateway/chat_service.hpp"
#include "moviebot/nlu/crf.hpp"
#include "moviebot/nlu/crf_nlu.hpp"
#include "moviebot/nlu/evaluate.hpp"
#include "moviebot/nlu/joint_model.hpp"
#include "moviebot/nlu/rule_parser.hpp"
#include "moviebot/recsys/user_store.hpp"
#include "moviebot/sim/evaluation.hpp"
#include "test_support.hpp"

using namespace moviebot;
using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

double lse(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// ------------------------------------------------------------ reward cases

Item make_item(const std::string& id, const std::string& genre, double rating) {
  Item it;
  it.id = id;
  it.title = "Movie " + id;
  it.year = 2000;
  it.genres = {genre};
  it.director = "Dir " + id;
  it.actors = {"Actor " + id};
  it.rating = rating;
  return it;
}

Outcome reward_cases() {
  sim::EnvConfig cfg;
  cfg.reward.per_turn = 0.0;
  cfg.simulator.p_comply = 1.0;
  cfg.simulator.p_remove = 0.0;
  const auto idx = [](policy::AgentAction a) { return policy::index_of(a); };
  using A = policy::AgentAction;

  // Accepted: the only item is the user's target.
  sim::DialogueEnvironment one(
      std::make_shared<const Catalog>(Catalog({make_item("a", "comedy", 7)})), cfg);
  one.reset(1);
  const double accepted = one.step(idx(A::kRecommend)).reward;

  // Recommendations made, none accepted: recommend the wrong movie, then leave.
  sim::DialogueEnvironment two(std::make_shared<const Catalog>(Catalog(
                                   {make_item("a", "comedy", 9), make_item("b", "thriller", 5)})),
                               cfg);
  std::uint64_t seed = 0;
  do {
    two.reset(++seed);
  } while (two.simulator().profile().seed_item != "b");
  double none_accepted = two.step(idx(A::kRecommend)).reward;
  none_accepted += two.step(idx(A::kBye)).reward;

  // No recommendation: leave straight away.
  auto toy = std::make_shared<const Catalog>(
      Catalog::load(testsupport::data_path("catalog/toy_10.jsonl")));
  sim::DialogueEnvironment three(toy, cfg);
  three.reset(1);
  const double no_rec = three.step(idx(A::kBye)).reward;

  // Tracker exception: INFORM before anything was recommended.
  sim::DialogueEnvironment four(toy, cfg);
  four.reset(1);
  const double tracker = four.step(idx(A::kInform)).reward;

  return {accepted == 100.0 && none_accepted == -50.0 && no_rec == -100.0 && tracker == -1000.0,
          fmt::format("accepted {} none_accepted {} no_recommendation {} tracker_exception {}",
                      accepted, none_accepted, no_rec, tracker)};
}

// ------------------------------------------------------------ CRF oracle

using Kind = nlu::TagSet::Kind;
struct ToyTag {
  Kind kind;
  Slot slot;
};

std::vector<ToyTag> toy_alphabet(std::size_t K) {
  const std::vector<ToyTag> all = {{Kind::kOutside, Slot::kGenre},
                                   {Kind::kBegin, Slot::kGenre},
                                   {Kind::kInside, Slot::kGenre},
                                   {Kind::kBegin, Slot::kActor}};
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(K)};
}

// BIO well-formedness written out directly: I-x only after B-x or I-x.
bool toy_valid(const std::vector<ToyTag>& tags, const std::vector<int>& y, bool slot_required) {
  bool any = false;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto& cur = tags[static_cast<std::size_t>(y[t])];
    any |= cur.kind != Kind::kOutside;
    if (cur.kind != Kind::kInside) continue;
    if (t == 0) return false;
    const auto& prev = tags[static_cast<std::size_t>(y[t - 1])];
    if (prev.kind == Kind::kOutside || prev.slot != cur.slot) return false;
  }
  return !slot_required || any;
}

Outcome crf_oracle() {
  Rng rng(424242);
  std::size_t instances = 0, z_bad = 0, path_bad = 0;
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t L = 1 + rng.index(5), K = 1 + rng.index(4);
    const auto toy = toy_alphabet(K);
    std::vector<nlu::TagSet::Tag> spec;
    for (const auto& t : toy) spec.push_back({t.kind, t.slot});
    const nlu::TagSet tags(spec);
    std::vector<double> e(L * K), tr((K + 1) * (K + 1));
    for (auto& v : e) v = rng.uniform(-2.0, 2.0);
    for (auto& v : tr) v = rng.uniform(-2.0, 2.0);
    const nlu::LatticeScores s{L, K, e, tr};
    for (bool required : {false, true}) {
      double z = kNegInf, best = kNegInf;
      std::vector<int> best_y, y(L, 0);
      for (;;) {
        if (toy_valid(toy, y, required)) {
          double sc = tr[K * (K + 1) + static_cast<std::size_t>(y[0])] + tr[static_cast<std::size_t>(y[L - 1]) * (K + 1) + K];
          for (std::size_t t = 0; t < L; ++t) sc += e[t * K + static_cast<std::size_t>(y[t])];
          for (std::size_t t = 1; t < L; ++t) sc += tr[static_cast<std::size_t>(y[t - 1]) * (K + 1) + static_cast<std::size_t>(y[t])];
          z = lse(z, sc);
          if (sc > best) {
            best = sc;
            best_y = y;
          }
        }
        std::size_t i = L;
        while (i > 0 && ++y[i - 1] == static_cast<int>(K)) y[--i] = 0;
        if (i == 0) break;
      }
      const auto c = required ? SlotConstraint::kSlotRequired : SlotConstraint::kUnconstrained;
      const double got = nlu::crf_log_partition(s, tags, c);
      ++instances;
      if (z == kNegInf) {
        // Only O tags and a slot required: no valid path at all.
        if (got != kNegInf) ++z_bad;
        bool threw = false;
        try {
          nlu::crf_viterbi(s, tags, c);
        } catch (const InfeasibleConstraintError&) {
          threw = true;
        }
        if (!threw) ++path_bad;
        continue;
      }
      const double err = std::fabs(got - z);
      worst = std::max(worst, err);
      if (!(err <= 1e-9)) ++z_bad;
      if (nlu::crf_viterbi(s, tags, c).tags != best_y) ++path_bad;
    }
  }
  return {z_bad == 0 && path_bad == 0,
          fmt::format("{} lattices, max |logZ - brute| {:.2e}, logZ mismatches {}, viterbi "
                      "mismatches {}",
                      instances, worst, z_bad, path_bad)};
}

// ------------------------------------------------------------ gradients

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-6});
}

// Per case: ||g - fd|| / max(||g||, ||fd||). Components near 1e-7 are below
// the central difference's roundoff floor, so the per-component figure is
// reported but not judged.
double case_rel_err(const std::vector<double>& g, const std::vector<double>& fd) {
  double d = 0.0, ng = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    d += (g[i] - fd[i]) * (g[i] - fd[i]);
    ng += g[i] * g[i];
    nf += fd[i] * fd[i];
  }
  const double den = std::sqrt(std::max(ng, nf));
  return den == 0.0 ? std::sqrt(d) : std::sqrt(d) / den;
}

Outcome gradient_checks() {
  const double h = 1e-5;
  Rng rng(8086);
  double crf_worst = 0.0, crf_comp = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t D = 5, L = 1 + rng.index(4);
    nlu::CrfModel m(nlu::TagSet::bio({Slot::kGenre, Slot::kActor}),
                    {SlotConstraint::kSlotRequired, SlotConstraint::kSlotFree,
                     SlotConstraint::kUnconstrained},
                    D);
    for (auto& w : m.params()) w = rng.uniform(-1.0, 1.0);
    nlu::EncodedUtterance in;
    for (std::size_t t = 0; t < L; ++t) {
      in.tokens.push_back("t" + std::to_string(t));
      nlu::FeatureList f;
      for (std::size_t j = 0, n = 1 + rng.index(3); j < n; ++j) {
        f.push_back(static_cast<std::uint32_t>(rng.index(D)));
      }
      in.token_features.push_back(f);
    }
    for (std::size_t j = 0, n = 1 + rng.index(3); j < n; ++j) {
      in.utterance_features.push_back(static_cast<std::uint32_t>(rng.index(D)));
    }
    std::size_t gi = 0;
    std::vector<int> gy;
    do {
      gi = rng.index(m.num_intents());
      gy.clear();
      for (std::size_t t = 0; t < L; ++t) gy.push_back(static_cast<int>(rng.index(m.num_tags())));
    } while (!nlu::crf_path_valid(m.tags(), m.constraint(gi), gy));
    std::vector<double> g(m.params().size(), 0.0), fd(g.size());
    for (const auto& [p, v] : nlu::crf_loglik_and_grad(m, in, gi, gy).gradient) g[p] += v;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double w0 = m.params()[p];
      m.params()[p] = w0 + h;
      const double up = nlu::crf_loglik_and_grad(m, in, gi, gy).loglik;
      m.params()[p] = w0 - h;
      const double down = nlu::crf_loglik_and_grad(m, in, gi, gy).loglik;
      m.params()[p] = w0;
      fd[p] = (up - down) / (2 * h);
      crf_comp = std::max(crf_comp, rel_err(g[p], fd[p]));
    }
    crf_worst = std::max(crf_worst, case_rel_err(g, fd));
  }

  double mlp_worst = 0.0, mlp_comp = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::size_t> sizes{1 + rng.index(30)};
    for (std::size_t l = 0, n = 1 + rng.index(2); l < n; ++l) sizes.push_back(1 + rng.index(16));
    sizes.push_back(1 + rng.index(9));
    auto net = policy::Mlp::he_uniform(sizes, rng);
    for (auto& p : net.params()) p += rng.uniform(-0.1, 0.1);
    std::vector<double> x(net.input_size()), c(net.output_size());
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    const auto loss = [&] {
      const auto y = net.forward(x);
      double s = 0.0;
      for (std::size_t o = 0; o < y.size(); ++o) s += c[o] * y[o];
      return s;
    };
    const auto g = policy::mlp_grad(net, x, c);
    std::vector<double> fd(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double w0 = net.params()[p];
      net.params()[p] = w0 + h;
      const double up = loss();
      net.params()[p] = w0 - h;
      const double down = loss();
      net.params()[p] = w0;
      fd[p] = (up - down) / (2 * h);
      mlp_comp = std::max(mlp_comp, rel_err(g[p], fd[p]));
    }
    mlp_worst = std::max(mlp_worst, case_rel_err(g, fd));
  }
  return {crf_worst <= 1e-4 && mlp_worst <= 1e-4,
          fmt::format("h=1e-5, max per-case relative error CRF {:.2e}, MLP {:.2e} (100 cases "
                      "each; worst single component CRF {:.2e}, MLP {:.2e})",
                      crf_worst, mlp_worst, crf_comp, mlp_comp)};
}

// ------------------------------------------------------------ DQN oracle

Outcome dqn_oracle() {
  const auto q = moviebot::testing::chain_q_star(0.9);
  int good = 0;
  double worst = 0.0;
  std::size_t most_steps = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    moviebot::testing::ChainMdp env;
    const auto res = policy::dqn_train(env, moviebot::testing::chain_dqn_config(seed));
    most_steps = std::max(most_steps, res.env_steps);
    const auto q0 = res.net.forward(moviebot::testing::ChainMdp::one_hot(0));
    const auto q1 = res.net.forward(moviebot::testing::ChainMdp::one_hot(1));
    double err = 0.0;
    for (int a = 0; a < 2; ++a) {
      err = std::max({err, std::fabs(q0[a] - q[0][a]), std::fabs(q1[a] - q[1][a])});
    }
    worst = std::max(worst, err);
    good += policy::argmax(q0) == 0 && policy::argmax(q1) == 0 && err <= 0.05 &&
            res.env_steps <= 5000;
  }
  return {good >= 19, fmt::format("{}/20 runs greedy-optimal with |Q - Q*| <= 0.05, max steps {}, "
                                  "worst |Q - Q*| {:.4f}",
                                  good, most_steps, worst)};
}

// ------------------------------------------------------------ end to end

Outcome end_to_end() {
  auto catalog = testsupport::bundled_catalog();
  sim::EnvConfig cfg;
  cfg.encoder = EncoderKind::kWithIntents;
  sim::DialogueEnvironment env(catalog, cfg);
  policy::TrainConfig tc;
  tc.episodes = 5000;
  tc.seed = 1;
  const auto res = policy::dqn_train(env, tc);
  const policy::LearnedPolicy dqn(policy::LearnedKind::kDqn, EncoderKind::kWithIntents, res.net);
  const sim::EnvFactory make = [&] { return std::make_unique<sim::DialogueEnvironment>(catalog, cfg); };
  const auto md = sim::compute_metrics(sim::run_episodes_parallel(make, dqn, 500, 1000000));
  const auto mr =
      sim::compute_metrics(sim::run_episodes_parallel(make, policy::RandomPolicy(), 500, 1000000));
  return {md.R >= mr.R + 50.0 && md.S > mr.S,
          fmt::format("DQN R {:.2f} S {:.1f}% vs random R {:.2f} S {:.1f}% (margin {:.2f})", md.R,
                      md.S, mr.R, mr.S, md.R - mr.R)};
}

// ------------------------------------------------------------ friendly

Outcome friendly_success() {
  sim::EnvConfig cfg;
  cfg.simulator.p_comply = 1.0;
  cfg.simulator.p_remove = 0.0;
  sim::DialogueEnvironment env(std::make_shared<const Catalog>(Catalog::load(
                                   testsupport::data_path("catalog/toy_10.jsonl"))),
                               cfg);
  const auto m = sim::compute_metrics(sim::run_episodes(env, policy::RulePolicy(), 100, 1));
  return {m.S == 100.0 && m.W == 0.0, fmt::format("S {:.1f} W {:.1f} over {} episodes", m.S, m.W,
                                                  m.episodes)};
}

// ------------------------------------------------------------ metrics

Outcome metrics_fixture() {
  auto log = [](double r, bool s, bool f, std::size_t u) {
    sim::EpisodeLog l;
    l.total_reward = r;
    l.success = s;
    l.tracker_failed = f;
    l.transcript.resize(u);
    return l;
  };
  const auto m = sim::compute_metrics(
      {log(90, true, false, 10), log(-80, false, false, 20), log(-1000, false, true, 4)});
  return {m.R == -330.0 && std::fabs(m.S - 33.3) <= 0.1 && std::fabs(m.U - 11.33) <= 0.01 &&
              std::fabs(m.W - 33.3) <= 0.1,
          fmt::format("R {:.2f} S {:.3f} U {:.3f} W {:.3f}", m.R, m.S, m.U, m.W)};
}

// ------------------------------------------------------------ NLU

Outcome nlu_regression() {
  const auto corpus = nlu::read_corpus(testsupport::data_path("nlu/corpus_500.tsv"));
  const nlu::RuleBasedNlu rule(testsupport::bundled_lexicons(),
                               nlu::load_intent_patterns(testsupport::data_path("nlu/intent_patterns.tsv")));
  const auto rr = nlu::evaluate_nlu(rule, corpus);
  const auto split = nlu::split_corpus(corpus, 0.8, 7);
  const auto enc = testsupport::encoder(nlu::kDefaultHashDim);
  nlu::CrfTrainConfig tc;
  tc.seed = 7;
  const nlu::CrfNlu crf(std::make_shared<const nlu::CrfModel>(nlu::crf_train(split.train, *enc, tc).model),
                        enc);
  const auto cr = nlu::evaluate_nlu(crf, split.test);
  return {corpus.size() == 500 && rr.intent.f1 >= 0.95 && rr.slot.f1 >= 0.90 && cr.intent.f1 >= 0.85,
          fmt::format("rule intent F1 {:.3f} slot F1 {:.3f} ({} records); CRF intent F1 {:.3f} slot "
                      "F1 {:.3f} ({} held out)",
                      rr.intent.f1, rr.slot.f1, corpus.size(), cr.intent.f1, cr.slot.f1,
                      split.test.size())};
}

// ------------------------------------------------------------ determinism

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  testsupport::TempDir dir("accept_det");
  struct Cmd {
    std::vector<std::string> args;
    std::vector<std::string> files;
    std::string input;
  };
  const auto f = [&](const std::string& n) { return dir.file(n); };
  const std::vector<Cmd> cmds = {
      {{"train-policy", "--algo", "dqn", "--encoder", "with_intents", "--episodes", "300", "--seed", "11",
        "--out", f("dqn.pol"), "--curve", f("dqn.csv")},
       {f("dqn.pol"), f("dqn.csv")},
       ""},
      {{"train-policy", "--algo", "a2c", "--episodes", "300", "--seed", "11", "--out", f("a2c.pol"),
        "--curve", f("a2c.csv")},
       {f("a2c.pol"), f("a2c.csv")},
       ""},
      {{"eval-policy", "--policy", f("dqn.pol"), "--episodes", "200", "--seed", "5",
        "--random-baseline", "--csv", f("m.csv"), "--logs", f("dqn.jsonl")},
       {f("m.csv"), f("dqn.jsonl")},
       ""},
      {{"eval-policy", "--policy", "random", "--env", "nlu", "--episodes", "100", "--seed", "5",
        "--logs", f("nlu.jsonl")},
       {f("nlu.jsonl")},
       ""},
      {{"gen-corpus", "--per-intent", "10", "--per-slot", "10", "--seed", "3", "--out", f("c.tsv")},
       {f("c.tsv")},
       ""},
      {{"train-nlu", "--corpus", f("c.tsv"), "--hash-dim", "4096", "--epochs", "5", "--out",
        f("m.crf")},
       {f("m.crf"), f("m.crf.json")},
       ""},
      {{"eval-policy", "--policy", "rule", "--env", "nlu", "--nlu", "crf", "--model", f("m.crf"),
        "--episodes", "50", "--seed", "9", "--logs", f("crf.jsonl")},
       {f("crf.jsonl")},
       ""},
      {{"chat", "--seed", "3"}, {}, "hi\ni want a comedy\nwho directed it\n/state\nsounds good\n"},
  };
  std::size_t compared = 0, differing = 0;
  std::string first_diff;
  for (const auto& c : cmds) {
    std::vector<std::string> outputs;
    for (int round = 0; round < 2; ++round) {
      std::istringstream in(c.input);
      std::ostringstream out, err;
      const int code = cli::run(c.args, in, out, err);
      std::string all = std::to_string(code) + "\n" + out.str();
      for (const auto& file : c.files) all += "\n--\n" + slurp(file);
      outputs.push_back(std::move(all));
    }
    ++compared;
    if (outputs[0] != outputs[1] || outputs[0].rfind("0\n", 0) != 0) {
      ++differing;
      if (first_diff.empty()) first_diff = c.args[0];
    }
  }
  return {differing == 0,
          fmt::format("{} commands run twice, {} differing or failing{}", compared, differing,
                      first_diff.empty() ? "" : " (first: " + first_diff + ")")};
}

// ------------------------------------------------------------ gateway

gateway::ChatAssets chat_assets() {
  gateway::ChatAssets a;
  a.catalog = testsupport::bundled_catalog();
  a.nlu = std::make_shared<const nlu::RuleBasedNlu>(
      testsupport::bundled_lexicons(),
      nlu::load_intent_patterns(testsupport::data_path("nlu/intent_patterns.tsv")));
  a.policy = std::make_shared<const policy::RulePolicy>();
  a.templates = std::make_shared<const NlgTemplateTable>(
      NlgTemplateTable::load(testsupport::data_path("config/nlg_templates.tsv")));
  return a;
}

std::vector<json> script(gateway::ChatService& chat, const std::string& id,
                         const std::vector<std::string>& lines) {
  std::vector<json> out;
  for (const auto& l : lines) {
    for (const auto& m : chat.handle_user_message(id, l)) {
      auto j = gateway::to_json(m);
      j.erase("session");
      out.push_back(std::move(j));
    }
  }
  return out;
}

bool any_file_contains(const std::filesystem::path& root, const std::string& needle) {
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && slurp(e.path().string()).find(needle) != std::string::npos) return true;
  }
  return false;
}

Outcome gateway_checks() {
  const std::vector<std::string> a = {"hi", "i want a comedy", "something with Tom Hanks",
                                      "i've already seen it", "who directed it", "sounds good"};
  const std::vector<std::string> b = {"i like horror movies", "no thanks", "from the 1980s",
                                      "forget about horror", "show me more", "goodbye"};
  gateway::ChatService serial(chat_assets());
  const auto sa = serial.create_session().session;
  const auto sb = serial.create_session().session;
  const auto ta = script(serial, sa, a);
  const auto tb = script(serial, sb, b);
  int isolated = 0;
  for (int rep = 0; rep < 20; ++rep) {
    gateway::ChatService chat(chat_assets());
    const auto ia = chat.create_session().session;
    const auto ib = chat.create_session().session;
    std::vector<json> ra, rb;
    std::thread t1([&] { ra = script(chat, ia, a); });
    std::thread t2([&] { rb = script(chat, ib, b); });
    t1.join();
    t2.join();
    isolated += ra == ta && rb == tb;
  }

  testsupport::TempDir dir("accept_gw");
  auto users = std::make_shared<UserStore>(dir.path / "users");
  auto auth = std::make_shared<gateway::AuthStore>(dir.path / "auth.jsonl");
  gateway::ChatService chat(chat_assets(), users, auth);
  const std::string password = "Accept4nce-Pa55word";
  chat.register_user("dana", password);
  const auto s = chat.create_session().session;
  chat.login(s, "dana", password);
  chat.handle_user_message(s, "i like comedy movies");
  const auto statements =
      chat.get_user_model(s, "summary").payload["statements"].get<std::vector<std::string>>();
  const bool summary_ok =
      std::find(statements.begin(), statements.end(), "You like comedy movies.") != statements.end();
  chat.end_session(s);
  const bool leaked = any_file_contains(dir.path, password);
  return {isolated == 20 && summary_ok && !leaked,
          fmt::format("{}/20 threaded runs equal serial transcripts; summary statement {}; "
                      "plaintext password in store {}",
                      isolated, summary_ok ? "found" : "missing", leaked ? "FOUND" : "absent")};
}

// ------------------------------------------------------------ user model

Outcome user_model_checks() {
  testsupport::TempDir dir("accept_um");
  UserStore store(dir.path);
  store.create("erin");
  auto m = begin_session(make_user_model("erin"), "s1");
  const auto act = [](int polarity) {
    return make_user_act(UserIntent::kReveal, {SlotValue{Slot::kGenre, "horror", polarity, std::nullopt}});
  };
  m = update_user_model(m, act(-1), Utterance{Speaker::kUser, "no horror", {act(-1)}, 1},
                        Scope::kShortTerm, "s1", 10);
  m = update_user_model(m, act(+1), Utterance{Speaker::kUser, "horror is fine", {act(+1)}, 2},
                        Scope::kShortTerm, "s1", 11);
  m = promote_preferences(m, "s1", 12);
  store.persist(m);
  const auto back = store.load("erin");
  std::size_t horror_events = 0;
  for (const auto& e : back.events) {
    horror_events += e.value == "horror" && e.scope == Scope::kShortTerm && !e.removed;
  }
  bool plus = false, minus = false;
  for (const auto& v : back.current_view()) {
    if (v.value != "horror") continue;
    plus |= v.polarity == +1;
    minus |= v.polarity == -1;
  }
  return {back == m && horror_events == 2 && plus && !minus,
          fmt::format("round trip {}; {} events in log for the pair; view polarity {}",
                      back == m ? "equal" : "DIFFERENT", horror_events,
                      plus && !minus ? "+1" : "wrong")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"reward-case exactness", 1.0, reward_cases},
      {"CRF oracle equivalence", 10.0, crf_oracle},
      {"gradient checks", 30.0, gradient_checks},
      {"DQN chain oracle", 60.0, dqn_oracle},
      {"end-to-end policy learning", 600.0, end_to_end},
      {"friendly-simulator success", 5.0, friendly_success},
      {"metrics arithmetic", 0.0, metrics_fixture},
      {"NLU regression", 120.0, nlu_regression},
      {"determinism", 0.0, determinism},
      {"gateway", 0.0, gateway_checks},
      {"user model", 0.0, user_model_checks},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    const std::string limit = c.limit_s == 0.0 ? "" : fmt::format(" < {:g}s", c.limit_s);
    std::cout << fmt::format("{} {}: {} [{:.2f}s{}{}]", pass ? "PASS" : "FAIL", c.name, o.detail,
                             secs, limit, in_time ? "" : " EXCEEDED")
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - static_cast<std::size_t>(failures),
                           criteria.size())
            << std::endl;
  return failures;
}
