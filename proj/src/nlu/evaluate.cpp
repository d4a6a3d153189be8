#include "moviebot/nlu/evaluate.hpp"

#include <set>
#include <tuple>

#include "moviebot/util/errors.hpp"

namespace moviebot::nlu {

Prf prf_from_counts(std::size_t tp, std::size_t predicted, std::size_t gold) {
  Prf r;
  r.true_positives = tp;
  r.predicted = predicted;
  r.gold = gold;
  r.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  r.recall = gold ? static_cast<double>(tp) / static_cast<double>(gold) : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

std::vector<NluOutput> parse_all_serial(const NluEngine& engine,
                                        const std::vector<std::string>& texts) {
  std::vector<NluOutput> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(engine.parse(t));
  return out;
}

std::vector<NluOutput> parse_all_parallel(const NluEngine& engine,
                                          const std::vector<std::string>& texts) {
  std::vector<NluOutput> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = engine.parse(texts[static_cast<std::size_t>(i)]);
  }
  return out;
}

NluReport score_predictions(const LabeledCorpus& corpus, const std::vector<NluOutput>& preds) {
  if (corpus.size() != preds.size()) throw DimensionError("prediction count differs from corpus");
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  NluReport rep;
  rep.records = corpus.size();
  std::size_t intent_tp = 0, slot_tp = 0, slot_pred = 0, slot_gold = 0;
  std::array<std::size_t, kNumUserIntents> i_tp{}, i_pred{}, i_gold{};
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    const auto& r = corpus[n];
    const auto& act = preds[n].act;
    const auto* pi = std::get_if<UserIntent>(&act.intent);
    const std::size_t gold_i = index_of(r.intent);
    ++i_gold[gold_i];
    if (pi) {
      ++i_pred[index_of(*pi)];
      if (*pi == r.intent) {
        ++intent_tp;
        ++i_tp[gold_i];
      }
    }
    std::set<Key> gold;
    for (const auto& s : spans_from_tags(TagSet::standard(), tag_indices(r))) {
      gold.insert({index_of(s.slot), s.span.begin, s.span.end});
    }
    std::set<Key> pred;
    for (const auto& sv : act.slot_values) {
      if (sv.span) pred.insert({index_of(sv.slot), sv.span->begin, sv.span->end});
    }
    slot_gold += gold.size();
    slot_pred += pred.size();
    for (const auto& k : pred) slot_tp += gold.count(k);
  }
  rep.intent = prf_from_counts(intent_tp, corpus.size(), corpus.size());
  rep.slot = prf_from_counts(slot_tp, slot_pred, slot_gold);
  for (std::size_t i = 0; i < kNumUserIntents; ++i) {
    rep.per_intent[i] = prf_from_counts(i_tp[i], i_pred[i], i_gold[i]);
  }
  return rep;
}

NluReport evaluate_nlu(const NluEngine& engine, const LabeledCorpus& corpus, bool parallel) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& r : corpus) texts.push_back(r.text);
  return score_predictions(corpus,
                           parallel ? parse_all_parallel(engine, texts)
                                    : parse_all_serial(engine, texts));
}

}  // namespace moviebot::nlu
