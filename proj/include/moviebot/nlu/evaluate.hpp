#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "moviebot/nlu/corpus.hpp"
#include "moviebot/nlu/engine.hpp"

namespace moviebot::nlu {

struct Prf {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// P = tp/predicted, R = tp/gold (0 when the denominator is 0),
// F1 = 2PR/(P+R), 0 when P+R = 0.
Prf prf_from_counts(std::size_t tp, std::size_t predicted, std::size_t gold);

struct NluReport {
  std::size_t records = 0;
  Prf intent;  // micro-averaged over records
  Prf slot;    // exact (slot, token span) matches
  std::array<Prf, kNumUserIntents> per_intent{};
};

// Serial reference and OpenMP batch decoding; identical results.
std::vector<NluOutput> parse_all_serial(const NluEngine& engine,
                                        const std::vector<std::string>& texts);
std::vector<NluOutput> parse_all_parallel(const NluEngine& engine,
                                          const std::vector<std::string>& texts);

NluReport score_predictions(const LabeledCorpus& corpus, const std::vector<NluOutput>& preds);
NluReport evaluate_nlu(const NluEngine& engine, const LabeledCorpus& corpus,
                       bool parallel = true);

}  // namespace moviebot::nlu
