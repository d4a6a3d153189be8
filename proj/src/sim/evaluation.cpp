#include "moviebot/sim/evaluation.hpp"

#include <fstream>

#include <fmt/format.h>

#include "moviebot/core/act_json.hpp"
#include "moviebot/util/errors.hpp"

namespace moviebot::sim {

EpisodeLog run_episode(DialogueEnvironment& env, policy::Policy& policy, std::uint64_t seed) {
  policy.begin_episode(seed);
  env.reset(seed);
  while (true) {
    if (env.step(policy::index_of(policy.act(env.state()))).done) break;
  }
  return env.log();
}

std::vector<EpisodeLog> run_episodes(DialogueEnvironment& env, const policy::Policy& policy,
                                     std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("run_episodes needs n >= 1");
  auto p = policy.clone();
  std::vector<EpisodeLog> logs;
  logs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) logs.push_back(run_episode(env, *p, seed + i));
  return logs;
}

std::vector<EpisodeLog> run_episodes_parallel(const EnvFactory& make_env,
                                              const policy::Policy& policy, std::size_t n,
                                              std::uint64_t seed) {
  if (n == 0) throw ConfigError("run_episodes needs n >= 1");
  std::vector<EpisodeLog> logs(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  std::exception_ptr failure;
#pragma omp parallel
  {
    std::unique_ptr<DialogueEnvironment> env;
    std::unique_ptr<policy::Policy> p;
    try {
      env = make_env();
      p = policy.clone();
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      if (!env || !p) continue;
      try {
        logs[static_cast<std::size_t>(i)] =
            run_episode(*env, *p, seed + static_cast<std::uint64_t>(i));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return logs;
}

Metrics compute_metrics(const std::vector<EpisodeLog>& logs) {
  if (logs.empty()) throw EmptyListError("compute_metrics needs at least one episode");
  Metrics m;
  m.episodes = logs.size();
  double succ = 0, fail = 0;
  for (const auto& l : logs) {
    m.R += l.total_reward;
    m.U += static_cast<double>(l.utterance_count());
    succ += l.success;
    fail += l.tracker_failed;
  }
  const double n = static_cast<double>(logs.size());
  m.R /= n;
  m.U /= n;
  m.S = 100.0 * succ / n;
  m.W = 100.0 * fail / n;
  return m;
}

std::string episode_to_json_line(const EpisodeLog& log) {
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& u : log.transcript) transcript.push_back(utterance_to_json(u));
  nlohmann::json j = {{"seed", log.seed},
                      {"reward", log.total_reward},
                      {"success", log.success},
                      {"tracker_failed", log.tracker_failed},
                      {"utterances", log.utterance_count()},
                      {"transcript", std::move(transcript)}};
  if (!log.error.empty()) j["error"] = log.error;
  return j.dump();
}

void write_episode_logs(const std::string& path, const std::vector<EpisodeLog>& logs) {
  std::ofstream out(path);
  if (!out) throw StorageError("cannot write episode logs to " + path);
  for (const auto& l : logs) out << episode_to_json_line(l) << '\n';
  if (!out) throw StorageError("failed writing " + path);
}

std::string format_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::size_t w = 6;
  for (const auto& [name, m] : rows) w = std::max(w, name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>10}  {:>6}  {:>6}  {:>6}\n", "policy", w,
                                "episodes", "R", "S%", "U", "W%");
  for (const auto& [name, m] : rows) {
    out += fmt::format("{:<{}}  {:>8}  {:>10.2f}  {:>6.1f}  {:>6.2f}  {:>6.1f}\n", name, w,
                       m.episodes, m.R, m.S, m.U, m.W);
  }
  return out;
}

std::string format_metrics_csv(const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::string out = "policy,episodes,R,S,U,W\n";
  for (const auto& [name, m] : rows) {
    out += fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n", name, m.episodes, m.R, m.S, m.U, m.W);
  }
  return out;
}

}  // namespace moviebot::sim
