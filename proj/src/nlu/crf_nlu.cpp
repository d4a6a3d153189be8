#include "moviebot/nlu/crf_nlu.hpp"

#include "moviebot/util/errors.hpp"

namespace moviebot::nlu {

NluOutput joint_decode(const CrfModel& model, const FeatureEncoder& encoder,
                       std::string_view text) {
  if (model.num_intents() != kNumUserIntents || model.num_tags() != kNumStandardTags) {
    throw DimensionError("joint_decode needs a model over the user intents and standard tags");
  }
  if (model.hash_dim() != encoder.hash_dim()) {
    throw DimensionError("model and encoder hash dimensions differ");
  }
  const auto input = encoder.encode(text);
  const auto pred = joint_predict(model, input);
  NluOutput out;
  out.act = act_from_tags(kAllUserIntents[pred.intent], input.tokens, model.tags(), pred.tags);
  out.intent_score = pred.intent_score;
  out.sequence_score = pred.sequence_score;
  return out;
}

CrfNlu::CrfNlu(std::shared_ptr<const CrfModel> model,
               std::shared_ptr<const FeatureEncoder> encoder)
    : model_(std::move(model)), encoder_(std::move(encoder)) {
  if (!model_ || !encoder_) throw ConfigError("CRF engine needs a model and an encoder");
}

NluOutput CrfNlu::parse(std::string_view text) const {
  return joint_decode(*model_, *encoder_, text);
}

std::vector<TrainingInstance> encode_corpus(const LabeledCorpus& corpus,
                                            const FeatureEncoder& encoder) {
  std::vector<TrainingInstance> out;
  out.reserve(corpus.size());
  for (const auto& r : corpus) {
    validate_record(r);
    out.push_back({encoder.encode(r.text), index_of(r.intent), tag_indices(r)});
  }
  return out;
}

CrfTrainResult crf_train(const LabeledCorpus& corpus, const FeatureEncoder& encoder,
                         const CrfTrainConfig& config) {
  if (corpus.empty()) throw EmptyCorpusError("cannot train on an empty corpus");
  return crf_train(CrfModel::standard(encoder.hash_dim()), encode_corpus(corpus, encoder),
                   config);
}

}  // namespace moviebot::nlu
