// Serial reference against the OpenMP kernels: episode evaluation, batch
// NLU decoding and batched MLP forward passes. Each pair is checked for
// identical results before timings are reported.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <omp.h>

#include <chrono>
#include <iostream>

#include "moviebot/nlu/crf_nlu.hpp"
#include "moviebot/nlu/evaluate.hpp"
#include "moviebot/nlu/rule_parser.hpp"
#include "moviebot/sim/evaluation.hpp"

using namespace moviebot;

namespace {

template <class F>
double best_seconds(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const std::string& kernel, std::size_t n, double serial, double parallel, bool same) {
  std::cout << fmt::format("{:<14} {:>8} {:>11.4f} {:>11.4f} {:>8.2f} {:>6}\n", kernel, n, serial,
                           parallel, serial / parallel, same ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moviebot OpenMP benchmarks"};
  std::string data_dir = MOVIEBOT_DATA_DIR;
  std::size_t episodes = 2000, utterances = 20000, rows = 50000;
  int reps = 3;
  app.add_option("--data-dir", data_dir, "Bundled data directory")->capture_default_str();
  app.add_option("--episodes", episodes, "Simulated episodes")->capture_default_str();
  app.add_option("--utterances", utterances, "Utterances to decode")->capture_default_str();
  app.add_option("--rows", rows, "MLP batch rows")->capture_default_str();
  app.add_option("--reps", reps, "Repetitions; the best time is kept")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::cout << fmt::format("threads {}\n", omp_get_max_threads());
  std::cout << fmt::format("{:<14} {:>8} {:>11} {:>11} {:>8} {:>6}\n", "kernel", "n", "serial_s",
                           "openmp_s", "speedup", "equal");

  auto catalog = std::make_shared<const Catalog>(Catalog::load(data_dir + "/catalog/movies_100.jsonl"));
  auto lex = std::make_shared<const nlu::Lexicons>(nlu::Lexicons::load(data_dir + "/nlu", *catalog));

  {
    sim::EnvConfig cfg;
    cfg.encoder = EncoderKind::kWithIntents;
    sim::DialogueEnvironment env(catalog, cfg);
    const sim::EnvFactory make = [&] { return std::make_unique<sim::DialogueEnvironment>(catalog, cfg); };
    const policy::RulePolicy pol;
    std::vector<sim::EpisodeLog> a, b;
    const double ts = best_seconds(reps, [&] { a = sim::run_episodes(env, pol, episodes, 1); });
    const double tp = best_seconds(reps, [&] { b = sim::run_episodes_parallel(make, pol, episodes, 1); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = sim::episode_to_json_line(a[i]) == sim::episode_to_json_line(b[i]);
    }
    report("episodes", episodes, ts, tp, same);
  }

  {
    const auto corpus = nlu::read_corpus(data_dir + "/nlu/corpus_500.tsv");
    auto enc = std::make_shared<const nlu::FeatureEncoder>(lex, catalog, 1 << 16);
    nlu::CrfTrainConfig tc;
    tc.epochs = 5;
    auto model = std::make_shared<const nlu::CrfModel>(nlu::crf_train(corpus, *enc, tc).model);
    const nlu::CrfNlu crf(model, enc);
    const nlu::RuleBasedNlu rule(lex, nlu::load_intent_patterns(data_dir + "/nlu/intent_patterns.tsv"));
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < utterances; ++i) texts.push_back(corpus[i % corpus.size()].text);
    for (const nlu::NluEngine* e : {static_cast<const nlu::NluEngine*>(&crf),
                                    static_cast<const nlu::NluEngine*>(&rule)}) {
      std::vector<nlu::NluOutput> a, b;
      const double ts = best_seconds(reps, [&] { a = nlu::parse_all_serial(*e, texts); });
      const double tp = best_seconds(reps, [&] { b = nlu::parse_all_parallel(*e, texts); });
      bool same = a.size() == b.size();
      for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a[i].act == b[i].act && a[i].intent_score == b[i].intent_score;
      }
      report(fmt::format("nlu-{}", e->name()), utterances, ts, tp, same);
    }
  }

  {
    Rng rng(3);
    const auto net = policy::Mlp::he_uniform({observation_size(EncoderKind::kWithIntents), 64, 64,
                                              policy::kNumActions},
                                             rng);
    std::vector<std::vector<double>> xs(rows, std::vector<double>(net.input_size()));
    for (auto& x : xs) {
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    }
    std::vector<std::vector<double>> a, b;
    const double ts = best_seconds(reps, [&] { a = policy::forward_batch_serial(net, xs); });
    const double tp = best_seconds(reps, [&] { b = policy::forward_batch_parallel(net, xs); });
    report("mlp-forward", rows, ts, tp, a == b);
  }
  return 0;
}
