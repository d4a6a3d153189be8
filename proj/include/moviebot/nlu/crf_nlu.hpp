#pragma once

#include <memory>

#include "moviebot/nlu/corpus.hpp"
#include "moviebot/nlu/engine.hpp"
#include "moviebot/nlu/features.hpp"
#include "moviebot/nlu/joint_model.hpp"

namespace moviebot::nlu {

// Decodes text with a production-shaped model (12 user intents, standard
// tags). Empty text yields UNK with no slots.
NluOutput joint_decode(const CrfModel& model, const FeatureEncoder& encoder,
                       std::string_view text);

class CrfNlu : public NluEngine {
 public:
  CrfNlu(std::shared_ptr<const CrfModel> model, std::shared_ptr<const FeatureEncoder> encoder);
  NluOutput parse(std::string_view text) const override;
  std::string_view name() const override { return "crf"; }
  const CrfModel& model() const { return *model_; }

 private:
  std::shared_ptr<const CrfModel> model_;
  std::shared_ptr<const FeatureEncoder> encoder_;
};

std::vector<TrainingInstance> encode_corpus(const LabeledCorpus& corpus,
                                            const FeatureEncoder& encoder);

// Trains a zero-initialized standard model on a labeled corpus.
CrfTrainResult crf_train(const LabeledCorpus& corpus, const FeatureEncoder& encoder,
                         const CrfTrainConfig& config);

}  // namespace moviebot::nlu
