#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "moviebot/core/vocab.hpp"
#include "moviebot/nlu/crf.hpp"
#include "moviebot/nlu/features.hpp"
#include "moviebot/nlu/tags.hpp"

namespace moviebot::nlu {

// Joint intent + slot model. All weights live in one flat vector:
//
//   [intent    I x D]   intent_index(i, f)
//   [emission  K x D]   emission_index(k, f)
//   [transition (K+1) x (K+1)]  row K = start, column K = stop
//   [compat    I x K]   added to the emission of tag k under intent i
//
// score(i, y | x) = sum_f intent[i][f] over utterance features
//                 + sum_t (emission[y_t] . phi_t + compat[i][y_t])
//                 + transitions along start, y_1 .. y_L, stop
// with p(i, y | x) normalized jointly over every intent's constrained
// lattice.
//
// The production model uses the 12 user intents (vocabulary order) and the
// 13-tag BIO alphabet; tests instantiate small models directly.
class CrfModel {
 public:
  CrfModel(TagSet tags, std::vector<SlotConstraint> constraints, std::size_t hash_dim);
  static CrfModel standard(std::size_t hash_dim = kDefaultHashDim);

  std::size_t num_intents() const { return constraints_.size(); }
  std::size_t num_tags() const { return tags_.size(); }
  std::size_t hash_dim() const { return hash_dim_; }
  const TagSet& tags() const { return tags_; }
  SlotConstraint constraint(std::size_t intent) const { return constraints_[intent]; }
  const std::vector<SlotConstraint>& constraints() const { return constraints_; }

  std::size_t intent_index(std::size_t i, std::size_t f) const { return i * hash_dim_ + f; }
  std::size_t emission_index(std::size_t k, std::size_t f) const {
    return (num_intents() + k) * hash_dim_ + f;
  }
  std::size_t transition_offset() const { return (num_intents() + num_tags()) * hash_dim_; }
  std::size_t transition_index(std::size_t from, std::size_t to) const {
    return transition_offset() + from * (num_tags() + 1) + to;
  }
  std::size_t compat_offset() const {
    return transition_offset() + (num_tags() + 1) * (num_tags() + 1);
  }
  std::size_t compat_index(std::size_t i, std::size_t k) const {
    return compat_offset() + i * num_tags() + k;
  }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Binary "CRF1" file (little-endian) plus a JSON sidecar at path + ".json"
  // describing intents, tags, hash and feature-template version.
  void save(const std::string& path) const;
  static CrfModel load(const std::string& path);

  bool operator==(const CrfModel& other) const;

 private:
  TagSet tags_;
  std::vector<SlotConstraint> constraints_;
  std::size_t hash_dim_;
  std::vector<double> params_;
};

// Emission and transition arrays of one intent's lattice. Tags of the year
// slot are masked to -inf except B-year on year-like tokens, so decoded year
// values are always valid.
struct IntentLattice {
  std::size_t length = 0;
  std::size_t num_tags = 0;
  std::vector<double> emissions;
  std::vector<double> transitions;
  LatticeScores view() const { return {length, num_tags, emissions, transitions}; }
};

double intent_score(const CrfModel& model, const EncodedUtterance& input, std::size_t intent);
IntentLattice build_lattice(const CrfModel& model, const EncodedUtterance& input,
                            std::size_t intent);

// Per-intent constrained partition function and best path (no intent term).
double crf_forward_logZ(const CrfModel& model, const EncodedUtterance& input,
                        std::size_t intent);
ViterbiPath crf_viterbi(const CrfModel& model, const EncodedUtterance& input,
                        std::size_t intent);

// log sum_i exp(intent_score_i + logZ_i).
double joint_log_partition(const CrfModel& model, const EncodedUtterance& input);

struct JointPrediction {
  std::size_t intent = 0;
  std::vector<int> tags;
  double intent_score = 0.0;
  double sequence_score = 0.0;
};

// argmax over (intent, constrained best path) of intent score + path score.
// Ties go to the lower intent index. An empty token sequence yields the last
// unconstrained intent (UNK in the production model) with no tags.
JointPrediction joint_predict(const CrfModel& model, const EncodedUtterance& input);

using SparseGradient = std::vector<std::pair<std::size_t, double>>;

struct LoglikGrad {
  double loglik = 0.0;
  SparseGradient gradient;  // may repeat indices; sum duplicates
};

// Exact log p(gold intent, gold tags | x) and its gradient. Throws
// InvalidGoldError when the gold sequence violates the intent's constraint
// or BIO well-formedness, EmptySequenceError for an empty input.
LoglikGrad crf_loglik_and_grad(const CrfModel& model, const EncodedUtterance& input,
                               std::size_t gold_intent, const std::vector<int>& gold_tags);

// Every parameter index read when scoring this input, sorted and unique.
std::vector<std::size_t> touched_indices(const CrfModel& model, const EncodedUtterance& input);

struct TrainingInstance {
  EncodedUtterance input;
  std::size_t intent = 0;
  std::vector<int> tags;
};

struct CrfTrainConfig {
  int epochs = 20;
  double learning_rate = 0.1;  // epoch e (1-based) uses learning_rate / e
  double l2 = 1e-4;
  std::uint64_t seed = 1;
};

struct CrfTrainResult {
  CrfModel model;
  // Per-epoch mean regularized log-likelihood of the averaged model:
  // (sum_n log p_n - l2/2 |w|^2) / N.
  std::vector<double> epoch_objective;
};

// Averaged stochastic gradient ascent. Starts from `init` (usually zeros).
// L2 decay and weight averaging are applied lazily, so a step costs time
// proportional to the features of one example. Deterministic under seed.
// Throws EmptyCorpusError for no instances.
CrfTrainResult crf_train(CrfModel init, const std::vector<TrainingInstance>& data,
                         const CrfTrainConfig& config);

}  // namespace moviebot::nlu
