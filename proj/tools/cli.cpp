#include "moviebot/cli/cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "moviebot/gateway/config.hpp"
#include "moviebot/gateway/server.hpp"
#include "moviebot/nlu/crf_nlu.hpp"
#include "moviebot/nlu/evaluate.hpp"
#include "moviebot/nlu/rule_parser.hpp"
#include "moviebot/sim/evaluation.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad flag values; exit 2 with the message.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_data_dir() {
#ifdef MOVIEBOT_DEFAULT_DATA_DIR
  return MOVIEBOT_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

struct DataPaths {
  std::string data_dir = default_data_dir();
  std::string catalog;
  std::string nlu_dir;
  std::string grammar;
  std::string templates;

  void add_to(CLI::App* app, bool need_grammar, bool need_templates) {
    app->add_option("--data-dir", data_dir, "Directory holding the bundled data files");
    app->add_option("--catalog", catalog, "Catalog JSON-lines file [<data-dir>/catalog/movies_100.jsonl]");
    app->add_option("--nlu-dir", nlu_dir, "Lexicon and pattern directory [<data-dir>/nlu]");
    if (need_grammar) {
      app->add_option("--grammar", grammar, "User grammar [<nlu-dir>/user_grammar.tsv]");
    }
    if (need_templates) {
      app->add_option("--templates", templates, "NLG templates [<data-dir>/config/nlg_templates.tsv]");
    }
  }

  void resolve() {
    if (catalog.empty()) catalog = data_dir + "/catalog/movies_100.jsonl";
    if (nlu_dir.empty()) nlu_dir = data_dir + "/nlu";
    if (grammar.empty()) grammar = nlu_dir + "/user_grammar.tsv";
    if (templates.empty()) templates = data_dir + "/config/nlg_templates.tsv";
  }

  json to_json() const {
    return {{"data_dir", data_dir}, {"catalog", catalog}, {"nlu_dir", nlu_dir},
            {"grammar", grammar},   {"templates", templates}};
  }
};

void require_file(const std::string& flag, const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file '" + path + "'");
}

void print_config(std::ostream& out, const std::string& command, json cfg) {
  cfg["command"] = command;
  out << "config: " << cfg.dump() << "\n";
}

std::shared_ptr<const Catalog> load_catalog(const DataPaths& p) {
  require_file("--catalog", p.catalog);
  return std::make_shared<const Catalog>(Catalog::load(p.catalog));
}

std::shared_ptr<const nlu::Lexicons> load_lexicons(const DataPaths& p, const Catalog& catalog) {
  return std::make_shared<const nlu::Lexicons>(nlu::Lexicons::load(p.nlu_dir, catalog));
}

std::shared_ptr<const nlu::NluEngine> make_nlu(const std::string& engine, const std::string& model,
                                               const DataPaths& p,
                                               std::shared_ptr<const Catalog> catalog) {
  auto lex = load_lexicons(p, *catalog);
  if (engine == "rule") {
    require_file("--nlu-dir", p.nlu_dir + "/intent_patterns.tsv");
    return std::make_shared<const nlu::RuleBasedNlu>(
        lex, nlu::load_intent_patterns(p.nlu_dir + "/intent_patterns.tsv"));
  }
  if (engine != "crf") throw UsageError("--nlu: expected rule or crf, got '" + engine + "'");
  if (model.empty()) throw UsageError("--model is required for the crf engine");
  require_file("--model", model);
  auto m = std::make_shared<const nlu::CrfModel>(nlu::CrfModel::load(model));
  auto enc = std::make_shared<const nlu::FeatureEncoder>(lex, catalog, m->hash_dim());
  return std::make_shared<const nlu::CrfNlu>(m, enc);
}

EncoderKind parse_encoder(const std::string& s) {
  auto e = parse_encoder_kind(s);
  if (!e) throw UsageError("--encoder: expected basic or with_intents, got '" + s + "'");
  return *e;
}

sim::EnvMode parse_mode(const std::string& s) {
  auto m = sim::parse_env_mode(s);
  if (!m) throw UsageError("--env: expected annotation or nlu, got '" + s + "'");
  return *m;
}

// Simulator and reward flags shared by training and evaluation.
struct EnvFlags {
  std::string mode = "annotation";
  std::string encoder = "basic";
  double per_turn = -1.0;
  int max_turns = kDefaultMaxTurns;
  sim::SimulatorConfig simulator;
  std::string nlu = "rule";
  std::string nlu_model;

  void add_to(CLI::App* app) {
    app->add_option("--env", mode, "Environment: annotation or nlu");
    app->add_option("--encoder", encoder, "State encoder: basic or with_intents");
    app->add_option("--per-turn", per_turn, "Reward paid on every step");
    app->add_option("--max-turns", max_turns, "Utterance cap per episode");
    app->add_option("--patience", simulator.patience, "Simulated user patience (user turns)");
    app->add_option("--p-comply", simulator.p_comply, "Probability the user answers a question");
    app->add_option("--p-remove", simulator.p_remove, "Probability the user drops a preference");
    app->add_option("--nlu", nlu, "NLU engine in nlu mode: rule or crf");
    app->add_option("--model", nlu_model, "CRF model file for --nlu crf");
  }

  sim::EnvConfig config() const {
    sim::EnvConfig c;
    c.mode = parse_mode(mode);
    c.encoder = parse_encoder(encoder);
    c.reward.per_turn = per_turn;
    c.max_turns = max_turns;
    c.simulator = simulator;
    c.simulator.validate();
    if (max_turns <= 0) throw UsageError("--max-turns must be positive");
    return c;
  }

  json to_json() const {
    return {{"env", mode},
            {"encoder", encoder},
            {"per_turn", per_turn},
            {"max_turns", max_turns},
            {"patience", simulator.patience},
            {"p_comply", simulator.p_comply},
            {"p_remove", simulator.p_remove},
            {"nlu", nlu},
            {"model", nlu_model}};
  }
};

sim::EnvFactory env_factory(const EnvFlags& flags, const DataPaths& paths,
                            std::shared_ptr<const Catalog> catalog) {
  const auto cfg = flags.config();
  std::shared_ptr<const nlu::NluEngine> engine;
  std::shared_ptr<const nlu::Grammar> grammar;
  if (cfg.mode == sim::EnvMode::kNlu) {
    engine = make_nlu(flags.nlu, flags.nlu_model, paths, catalog);
    require_file("--grammar", paths.grammar);
    grammar = std::make_shared<const nlu::Grammar>(nlu::Grammar::load(paths.grammar));
  }
  return [=] {
    return std::make_unique<sim::DialogueEnvironment>(catalog, cfg, engine, grammar);
  };
}

std::vector<std::size_t> parse_hidden(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(part, &pos);
      if (pos != part.size() || v <= 0) throw std::invalid_argument(part);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("--hidden: expected comma-separated positive sizes, got '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError("--hidden must name at least one layer");
  return out;
}

// ---------------------------------------------------------------- chat

struct ChatOptions {
  DataPaths paths;
  std::string nlu = "rule";
  std::string model;
  std::string policy = "rule";
  std::string store_dir;
  std::uint64_t seed = 0;
  int max_turns = kDefaultMaxTurns;
};

void print_messages(std::ostream& out, const std::vector<gateway::WireMessage>& ms) {
  for (const auto& m : ms) {
    switch (m.type) {
      case gateway::MessageType::kAgentMessage:
        out << "MovieBot: " << m.payload["text"].get<std::string>() << "\n";
        break;
      case gateway::MessageType::kRecommendation:
        out << "  [" << m.payload["item"]["title"].get<std::string>() << " ("
            << m.payload["item"]["year"].get<int>() << ")] "
            << m.payload["explanation"].get<std::string>() << "\n";
        break;
      case gateway::MessageType::kError:
        out << "error: " << m.payload["message"].get<std::string>() << "\n";
        break;
      case gateway::MessageType::kSystem:
        out << "(" << m.payload["event"].get<std::string>() << ")\n";
        break;
      default:
        out << gateway::to_json(m).dump() << "\n";
    }
  }
}

std::vector<std::string> words_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> w;
  for (std::string t; ss >> t;) w.push_back(t);
  return w;
}

int cmd_chat(const ChatOptions& o, std::istream& in, std::ostream& out) {
  gateway::ChatAssets assets;
  assets.catalog = load_catalog(o.paths);
  assets.nlu = make_nlu(o.nlu, o.model, o.paths, assets.catalog);
  if (o.policy == "rule") {
    assets.policy = std::make_shared<const policy::RulePolicy>(o.max_turns);
  } else {
    require_file("--policy", o.policy);
    assets.policy = std::make_shared<const policy::LearnedPolicy>(policy::load_policy(o.policy));
  }
  require_file("--templates", o.paths.templates);
  assets.templates =
      std::make_shared<const NlgTemplateTable>(NlgTemplateTable::load(o.paths.templates));
  assets.max_turns = o.max_turns;

  std::shared_ptr<UserStore> users;
  std::shared_ptr<gateway::AuthStore> auth;
  if (!o.store_dir.empty()) {
    users = std::make_shared<UserStore>(fs::path(o.store_dir) / "users");
    auth = std::make_shared<gateway::AuthStore>(fs::path(o.store_dir) / "auth.jsonl");
  }
  gateway::ChatConfig cfg;
  cfg.nlg_seed = o.seed;
  gateway::ChatService chat(assets, users, auth, cfg);
  auto created = chat.create_session();
  const auto id = created.session;
  print_messages(out, created.messages);

  std::string line;
  while (out << "> " << std::flush, std::getline(in, line)) {
    const auto w = words_of(line);
    try {
      if (!w.empty() && w[0] == "/quit") break;
      if (!w.empty() && w[0] == "/state") {
        out << gateway::state_to_json(chat.state(id)).dump(2) << "\n";
      } else if (!w.empty() && w[0] == "/model") {
        const auto m = chat.get_user_model(id, w.size() > 1 ? w[1] : "summary");
        if (m.payload.contains("statements")) {
          for (const auto& s : m.payload["statements"]) out << "  " << s.get<std::string>() << "\n";
        } else {
          out << m.payload.dump(2) << "\n";
        }
      } else if (!w.empty() && (w[0] == "/login" || w[0] == "/register")) {
        if (w.size() != 3) {
          out << "usage: " << w[0] << " <user> <password>\n";
          continue;
        }
        if (w[0] == "/register") chat.register_user(w[1], w[2]);
        print_messages(out, {chat.login(id, w[1], w[2])});
      } else if (!w.empty() && w[0][0] == '/') {
        out << "commands: /state /model [raw|summary] /register /login /quit\n";
      } else {
        print_messages(out, chat.handle_user_message(id, line));
        if (chat.terminated(id)) break;
      }
    } catch (const NotAuthenticated&) {
      out << "error: log in first (/login <user> <password>)\n";
    } catch (const BadCredentials&) {
      out << "error: invalid user name or password\n";
    } catch (const UnknownUserError&) {
      out << "error: invalid user name or password\n";
    } catch (const UserExistsError& e) {
      out << "error: " << e.what() << "\n";
    } catch (const ConfigError& e) {
      out << "error: " << e.what() << "\n";
    }
  }
  out << "\n";
  chat.end_session(id);
  return kExitOk;
}

// ---------------------------------------------------------------- serve

int cmd_serve(const std::string& config_path, const std::string& listen, std::ostream& out) {
  auto cfg = gateway::resolve_server_config(config_path);
  if (!listen.empty()) cfg.listen = listen;
  cfg.validate();
  print_config(out, "serve", cfg.to_json());
  const auto [host, port] = gateway::split_address(cfg.listen);
  auto assets = gateway::load_assets(cfg);
  auto users = std::make_shared<UserStore>(fs::path(cfg.store_dir) / "users");
  auto auth = std::make_shared<gateway::AuthStore>(fs::path(cfg.store_dir) / "auth.jsonl",
                                                   cfg.pbkdf2_iterations);
  gateway::ChatConfig chat_cfg;
  chat_cfg.idle_timeout = std::chrono::minutes(cfg.session_idle_minutes);
  chat_cfg.nlg_seed = cfg.nlg_seed;
  gateway::ChatService chat(assets, users, auth, chat_cfg);

  // Block the stop signals here; a helper thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  gateway::Server server(chat, host, port);
  out << "listening on " << host << ":" << server.port() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  waiter.join();
  return kExitOk;
}

// ---------------------------------------------------------------- policies

struct TrainOptions {
  DataPaths paths;
  EnvFlags env;
  std::string algo = "dqn";
  std::string out = "policy.pol";
  std::string curve = "curve.csv";
  std::string hidden = "64,64";
  policy::TrainConfig train;
};

json train_config_json(const policy::TrainConfig& c) {
  return {{"gamma", c.gamma},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"epsilon_decay_fraction", c.epsilon_decay_fraction},
          {"target_sync", c.target_sync},
          {"replay_capacity", c.replay_capacity},
          {"n_step", c.n_step},
          {"entropy_coef", c.entropy_coef},
          {"value_coef", c.value_coef},
          {"episodes", c.episodes},
          {"max_steps", c.max_steps},
          {"hidden", c.hidden},
          {"reward_scale", c.reward_scale},
          {"grad_clip", c.grad_clip},
          {"adam", c.adam},
          {"seed", c.seed}};
}

int cmd_train_policy(TrainOptions o, std::ostream& out) {
  if (o.algo != "dqn" && o.algo != "a2c") {
    throw UsageError("--algo: expected dqn or a2c, got '" + o.algo + "'");
  }
  o.train.hidden = parse_hidden(o.hidden);
  o.train.validate();
  const auto env_cfg = o.env.config();
  json cfg = o.paths.to_json();
  cfg.update(o.env.to_json());
  cfg.update(train_config_json(o.train));
  cfg["algo"] = o.algo;
  cfg["out"] = o.out;
  cfg["curve"] = o.curve;
  print_config(out, "train-policy", cfg);

  auto catalog = load_catalog(o.paths);
  auto env = env_factory(o.env, o.paths, catalog)();
  const auto result =
      o.algo == "dqn" ? policy::dqn_train(*env, o.train) : policy::a2c_train(*env, o.train);
  const auto kind = o.algo == "dqn" ? policy::LearnedKind::kDqn : policy::LearnedKind::kA2c;
  policy::save_policy(o.out, policy::LearnedPolicy(kind, env_cfg.encoder, result.net, env_cfg.max_turns));
  policy::write_curve_csv(o.curve, result.curve);

  const std::size_t tail = std::min<std::size_t>(100, result.curve.size());
  double reward = 0.0, success = 0.0;
  for (std::size_t i = result.curve.size() - tail; i < result.curve.size(); ++i) {
    reward += result.curve[i].reward;
    success += result.curve[i].success ? 1.0 : 0.0;
  }
  out << fmt::format("trained {} episodes, {} environment steps, {} gradient steps\n",
                     result.curve.size(), result.env_steps, result.grad_steps);
  out << fmt::format("last {} episodes: mean reward {:.2f}, success {:.1f}%\n", tail,
                     reward / static_cast<double>(tail), 100.0 * success / static_cast<double>(tail));
  out << "wrote " << o.out << " and " << o.curve << "\n";
  return kExitOk;
}

struct EvalOptions {
  DataPaths paths;
  EnvFlags env;
  std::string policy = "rule";
  std::size_t episodes = 100;
  std::uint64_t seed = 1;
  bool random_baseline = false;
  std::string csv;
  std::string logs;
  bool encoder_given = false;
};

int cmd_eval_policy(EvalOptions o, std::ostream& out) {
  if (o.episodes == 0) throw UsageError("--episodes must be positive");
  std::unique_ptr<policy::Policy> pol;
  if (o.policy == "rule") {
    pol = std::make_unique<policy::RulePolicy>(o.env.max_turns);
  } else if (o.policy == "random") {
    pol = std::make_unique<policy::RandomPolicy>();
  } else {
    require_file("--policy", o.policy);
    auto learned = policy::load_policy(o.policy);
    const auto env_enc = parse_encoder(o.env.encoder);
    if (o.encoder_given && env_enc != learned.encoder()) {
      throw DimensionError(fmt::format(
          "policy '{}' expects {} inputs ({} encoder) but --encoder {} gives {}", o.policy,
          learned.net().input_size(), name(learned.encoder()), o.env.encoder,
          observation_size(env_enc)));
    }
    o.env.encoder = std::string(name(learned.encoder()));
    pol = std::make_unique<policy::LearnedPolicy>(std::move(learned));
  }
  json cfg = o.paths.to_json();
  cfg.update(o.env.to_json());
  cfg.update(json{{"policy", o.policy},
                  {"episodes", o.episodes},
                  {"seed", o.seed},
                  {"random_baseline", o.random_baseline},
                  {"csv", o.csv},
                  {"logs", o.logs}});
  print_config(out, "eval-policy", cfg);

  auto catalog = load_catalog(o.paths);
  const auto factory = env_factory(o.env, o.paths, catalog);
  std::vector<std::pair<std::string, sim::Metrics>> rows;
  const auto logs = sim::run_episodes_parallel(factory, *pol, o.episodes, o.seed);
  rows.emplace_back(pol->name(), sim::compute_metrics(logs));
  if (o.random_baseline) {
    const auto base = sim::run_episodes_parallel(factory, policy::RandomPolicy(), o.episodes, o.seed);
    rows.emplace_back("random", sim::compute_metrics(base));
  }
  out << sim::format_metrics_table(rows);
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) throw StorageError("cannot write '" + o.csv + "'");
    f << sim::format_metrics_csv(rows);
  }
  if (!o.logs.empty()) sim::write_episode_logs(o.logs, logs);
  return kExitOk;
}

// ---------------------------------------------------------------- nlu

struct NluOptions {
  DataPaths paths;
  std::string corpus;
  double train_fraction = 0.8;
  std::uint64_t seed = 7;
  std::size_t hash_dim = nlu::kDefaultHashDim;
  nlu::CrfTrainConfig crf;
  std::string model = "nlu.crf";
  std::string engines = "rule";
  bool whole = false;
};

std::string report_rows(const std::string& engine, const nlu::NluReport& r) {
  return fmt::format("{:<6} {:<7} {:>9.3f} {:>9.3f} {:>9.3f}\n{:<6} {:<7} {:>9.3f} {:>9.3f} {:>9.3f}\n",
                     engine, "intent", r.intent.precision, r.intent.recall, r.intent.f1, engine,
                     "slot", r.slot.precision, r.slot.recall, r.slot.f1);
}

std::string report_header() {
  return fmt::format("{:<6} {:<7} {:>9} {:>9} {:>9}\n", "model", "metric", "precision", "recall",
                     "f1");
}

nlu::LabeledCorpus load_corpus(const NluOptions& o) {
  require_file("--corpus", o.corpus);
  auto c = nlu::read_corpus(o.corpus);
  if (c.empty()) throw UsageError("--corpus: '" + o.corpus + "' has no records");
  return c;
}

nlu::CorpusSplit split_for(const NluOptions& o, const nlu::LabeledCorpus& c) {
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
    throw UsageError("--train-fraction must lie in (0, 1)");
  }
  return nlu::split_corpus(c, o.train_fraction, o.seed);
}

json nlu_json(const NluOptions& o) {
  json j = o.paths.to_json();
  j.update(json{{"corpus", o.corpus},
                {"train_fraction", o.train_fraction},
                {"seed", o.seed},
                {"hash_dim", o.hash_dim},
                {"epochs", o.crf.epochs},
                {"learning_rate", o.crf.learning_rate},
                {"l2", o.crf.l2},
                {"model", o.model}});
  return j;
}

int cmd_train_nlu(NluOptions o, std::ostream& out) {
  o.crf.seed = o.seed;
  print_config(out, "train-nlu", nlu_json(o));
  const auto corpus = load_corpus(o);
  const auto split = split_for(o, corpus);
  auto catalog = load_catalog(o.paths);
  auto enc = std::make_shared<const nlu::FeatureEncoder>(load_lexicons(o.paths, *catalog), catalog,
                                                         o.hash_dim);
  auto result = nlu::crf_train(split.train, *enc, o.crf);
  result.model.save(o.model);
  out << fmt::format("trained on {} records, {} epochs, final objective {:.6f}\n",
                     split.train.size(), result.epoch_objective.size(),
                     result.epoch_objective.empty() ? 0.0 : result.epoch_objective.back());
  const nlu::CrfNlu engine(std::make_shared<const nlu::CrfModel>(result.model), enc);
  out << "held-out split (" << split.test.size() << " records)\n"
      << report_header() << report_rows("crf", nlu::evaluate_nlu(engine, split.test));
  out << "wrote " << o.model << "\n";
  return kExitOk;
}

int cmd_eval_nlu(NluOptions o, std::ostream& out) {
  json cfg = nlu_json(o);
  cfg["engines"] = o.engines;
  cfg["whole_corpus"] = o.whole;
  print_config(out, "eval-nlu", cfg);
  const auto corpus = load_corpus(o);
  const auto test = o.whole ? corpus : split_for(o, corpus).test;
  auto catalog = load_catalog(o.paths);
  out << (o.whole ? "whole corpus" : "held-out split") << " (" << test.size() << " records)\n"
      << report_header();
  std::stringstream ss(o.engines);
  for (std::string e; std::getline(ss, e, ',');) {
    const auto engine = make_nlu(e, o.model, o.paths, catalog);
    out << report_rows(e, nlu::evaluate_nlu(*engine, test));
  }
  return kExitOk;
}

struct GenOptions {
  DataPaths paths;
  std::size_t per_intent = 30;
  std::size_t per_slot = 30;
  std::uint64_t seed = 2024;
  std::string out = "corpus.tsv";
};

int cmd_gen_corpus(const GenOptions& o, std::ostream& out) {
  json cfg = o.paths.to_json();
  cfg.update(json{{"per_intent", o.per_intent}, {"per_slot", o.per_slot}, {"seed", o.seed},
                  {"out", o.out}});
  print_config(out, "gen-corpus", cfg);
  auto catalog = load_catalog(o.paths);
  require_file("--grammar", o.paths.grammar);
  const auto grammar = nlu::Grammar::load(o.paths.grammar);
  const auto fillers = nlu::Fillers::from_catalog(*catalog, *load_lexicons(o.paths, *catalog));
  const auto corpus = nlu::generate_corpus(grammar, fillers, o.per_intent, o.per_slot, o.seed);
  nlu::write_corpus(o.out, corpus);
  out << "wrote " << corpus.size() << " records to " << o.out << "\n";
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ConfigError*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DuplicateIdError*>(&e) ||
      dynamic_cast<const StorageError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const EmptyCatalogError*>(&e) || dynamic_cast<const EmptyCorpusError*>(&e) ||
      dynamic_cast<const GrammarCoverageError*>(&e) || dynamic_cast<const MissingTemplateError*>(&e) ||
      dynamic_cast<const VocabularyError*>(&e) || dynamic_cast<const InvalidGoldError*>(&e)) {
    return kExitData;
  }
  return kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"MovieBot conversational movie recommender"};
  app.name("moviebot");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  ChatOptions chat;
  auto* c = app.add_subcommand("chat", "Chat in the terminal");
  chat.paths.add_to(c, false, true);
  c->add_option("--nlu", chat.nlu, "NLU engine: rule or crf");
  c->add_option("--model", chat.model, "CRF model file for --nlu crf");
  c->add_option("--policy", chat.policy, "rule or a policy file");
  c->add_option("--store-dir", chat.store_dir, "User and credential store; empty keeps nothing");
  c->add_option("--seed", chat.seed, "NLG seed");
  c->add_option("--max-turns", chat.max_turns, "Utterance cap for the rule policy");

  std::string serve_config, serve_listen;
  auto* sv = app.add_subcommand("serve", "Run the HTTP and WebSocket gateway");
  sv->add_option("--config", serve_config, "Server config file (else $MOVIEBOT_CONFIG)");
  sv->add_option("--listen", serve_listen, "host:port, overrides the config and $MOVIEBOT_ADDR");

  TrainOptions train;
  auto* tp = app.add_subcommand("train-policy", "Train a dialogue policy with DQN or A2C");
  train.paths.add_to(tp, true, false);
  train.env.add_to(tp);
  tp->add_option("--algo", train.algo, "dqn or a2c");
  tp->add_option("--out", train.out, "Policy file to write");
  tp->add_option("--curve", train.curve, "Training-curve CSV to write");
  tp->add_option("--episodes", train.train.episodes, "Training episodes");
  tp->add_option("--max-steps", train.train.max_steps, "Step budget; 0 uses --episodes");
  tp->add_option("--seed", train.train.seed, "Training seed");
  tp->add_option("--gamma", train.train.gamma, "Discount");
  tp->add_option("--lr", train.train.learning_rate, "Learning rate");
  tp->add_option("--batch-size", train.train.batch_size, "DQN minibatch size");
  tp->add_option("--epsilon-start", train.train.epsilon_start, "Initial exploration rate");
  tp->add_option("--epsilon-end", train.train.epsilon_end, "Final exploration rate");
  tp->add_option("--epsilon-decay", train.train.epsilon_decay_fraction,
                 "Fraction of the budget over which epsilon decays");
  tp->add_option("--target-sync", train.train.target_sync, "Gradient steps between target copies");
  tp->add_option("--replay", train.train.replay_capacity, "Replay buffer capacity");
  tp->add_option("--n-step", train.train.n_step, "A2C rollout length");
  tp->add_option("--entropy-coef", train.train.entropy_coef, "A2C entropy weight");
  tp->add_option("--value-coef", train.train.value_coef, "A2C value-loss weight");
  tp->add_option("--hidden", train.hidden, "Hidden layer sizes, comma separated");
  tp->add_option("--reward-scale", train.train.reward_scale, "Reward multiplier inside the losses");
  tp->add_option("--grad-clip", train.train.grad_clip, "Global gradient norm cap; 0 disables");
  tp->add_flag("--adam", train.train.adam, "Use Adam instead of SGD");

  EvalOptions eval;
  auto* ep = app.add_subcommand("eval-policy", "Evaluate a policy against the simulator");
  eval.paths.add_to(ep, true, false);
  eval.env.add_to(ep);
  ep->add_option("--policy", eval.policy, "rule, random or a policy file");
  ep->add_option("--episodes", eval.episodes, "Evaluation episodes");
  ep->add_option("--seed", eval.seed, "Seed of the first episode");
  ep->add_flag("--random-baseline", eval.random_baseline, "Also evaluate a uniform-random policy");
  ep->add_option("--csv", eval.csv, "Write the metrics table as CSV");
  ep->add_option("--logs", eval.logs, "Write episode transcripts as JSON lines");

  NluOptions tn;
  auto* tnl = app.add_subcommand("train-nlu", "Train the CRF NLU on a seeded split");
  tn.paths.add_to(tnl, false, false);
  tnl->add_option("--corpus", tn.corpus, "Labeled corpus [<nlu-dir>/corpus_500.tsv]");
  tnl->add_option("--train-fraction", tn.train_fraction, "Share of records used for training");
  tnl->add_option("--seed", tn.seed, "Split and shuffling seed");
  tnl->add_option("--hash-dim", tn.hash_dim, "Feature hash buckets");
  tnl->add_option("--epochs", tn.crf.epochs, "Training epochs");
  tnl->add_option("--lr", tn.crf.learning_rate, "Initial learning rate");
  tnl->add_option("--l2", tn.crf.l2, "L2 penalty");
  tnl->add_option("--out", tn.model, "Model file to write");

  NluOptions en;
  auto* enl = app.add_subcommand("eval-nlu", "Precision, recall and F1 for NLU engines");
  en.paths.add_to(enl, false, false);
  enl->add_option("--corpus", en.corpus, "Labeled corpus [<nlu-dir>/corpus_500.tsv]");
  enl->add_option("--engines", en.engines, "Comma-separated engines: rule, crf");
  enl->add_option("--model", en.model, "CRF model file");
  enl->add_option("--train-fraction", en.train_fraction, "Share of records used for training");
  enl->add_option("--seed", en.seed, "Split seed");
  enl->add_flag("--whole", en.whole, "Score the whole corpus instead of the held-out split");

  GenOptions gen;
  auto* gc = app.add_subcommand("gen-corpus", "Generate a labeled NLU corpus from the grammar");
  gen.paths.add_to(gc, true, false);
  gc->add_option("--per-intent", gen.per_intent, "Records per slot-free intent");
  gc->add_option("--per-slot", gen.per_slot, "Records per intent and slot");
  gc->add_option("--seed", gen.seed, "Generation seed");
  gc->add_option("--out", gen.out, "Corpus file to write");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c->parsed()) {
      chat.paths.resolve();
      json cfg = chat.paths.to_json();
      cfg.update(json{{"nlu", chat.nlu}, {"model", chat.model}, {"policy", chat.policy},
                      {"store_dir", chat.store_dir}, {"seed", chat.seed},
                      {"max_turns", chat.max_turns}});
      print_config(out, "chat", cfg);
      return cmd_chat(chat, in, out);
    }
    if (sv->parsed()) return cmd_serve(serve_config, serve_listen, out);
    if (tp->parsed()) {
      train.paths.resolve();
      return cmd_train_policy(train, out);
    }
    if (ep->parsed()) {
      eval.paths.resolve();
      eval.encoder_given = ep->count("--encoder") > 0;
      return cmd_eval_policy(eval, out);
    }
    if (tnl->parsed() || enl->parsed()) {
      auto& o = tnl->parsed() ? tn : en;
      o.paths.resolve();
      if (o.corpus.empty()) o.corpus = o.paths.nlu_dir + "/corpus_500.tsv";
      return tnl->parsed() ? cmd_train_nlu(o, out) : cmd_eval_nlu(o, out);
    }
    if (gc->parsed()) {
      gen.paths.resolve();
      return cmd_gen_corpus(gen, out);
    }
  } catch (const std::exception& e) {
    out << std::flush;
    err << "moviebot: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace moviebot::cli
