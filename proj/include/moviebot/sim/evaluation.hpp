#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "moviebot/policy/policies.hpp"
#include "moviebot/sim/environment.hpp"

namespace moviebot::sim {

// Plays one episode with the policy acting greedily on the tracked state.
// The policy is told the seed first (begin_episode).
EpisodeLog run_episode(DialogueEnvironment& env, policy::Policy& policy, std::uint64_t seed);

// Episode i uses seed + i. ConfigError when n == 0.
std::vector<EpisodeLog> run_episodes(DialogueEnvironment& env, const policy::Policy& policy,
                                     std::size_t n, std::uint64_t seed);

// Same episodes spread over OpenMP threads, one environment (from the
// factory) and one policy clone per episode. Identical to run_episodes.
using EnvFactory = std::function<std::unique_ptr<DialogueEnvironment>()>;
std::vector<EpisodeLog> run_episodes_parallel(const EnvFactory& make_env,
                                              const policy::Policy& policy, std::size_t n,
                                              std::uint64_t seed);

struct Metrics {
  std::size_t episodes = 0;
  double R = 0.0;  // mean episode reward
  double S = 0.0;  // % successful
  double U = 0.0;  // mean utterances, both speakers
  double W = 0.0;  // % with a tracker failure
};

// EmptyListError on an empty list.
Metrics compute_metrics(const std::vector<EpisodeLog>& logs);

// One JSON object per line: seed, reward, success, tracker_failed, error,
// utterances, transcript [{speaker, text, acts}].
std::string episode_to_json_line(const EpisodeLog& log);
void write_episode_logs(const std::string& path, const std::vector<EpisodeLog>& logs);

// Aligned text table and CSV with one row per named run.
std::string format_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows);
std::string format_metrics_csv(const std::vector<std::pair<std::string, Metrics>>& rows);

}  // namespace moviebot::sim
