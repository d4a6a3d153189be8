#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/nlu/lexicon.hpp"
#include "moviebot/nlu/tags.hpp"
#include "moviebot/recsys/catalog.hpp"
#include "moviebot/util/rng.hpp"

namespace moviebot::nlu {

struct LabeledRecord {
  UserIntent intent = UserIntent::kUnk;
  std::string text;
  std::vector<std::string> tags;  // one BIO tag name per token of text

  bool operator==(const LabeledRecord&) const = default;
};
using LabeledCorpus = std::vector<LabeledRecord>;

// Throws InvalidGoldError unless the tags are standard BIO names, aligned
// with tokenize(text), well formed, and valid for the intent's constraint.
void validate_record(const LabeledRecord& record);
std::vector<int> tag_indices(const LabeledRecord& record);

// TSV: intent<TAB>text<TAB>space-separated tags. '#' lines are comments.
LabeledCorpus read_corpus(const std::string& path);
void write_corpus(const std::string& path, const LabeledCorpus& corpus);

struct CorpusSplit {
  LabeledCorpus train;
  LabeledCorpus test;
};
// Seeded shuffle, then the first round(train_fraction * N) records train.
CorpusSplit split_corpus(const LabeledCorpus& corpus, double train_fraction, std::uint64_t seed);

// One grammar template. Slot-free and unconstrained intents have no marker;
// REVEAL and REMOVE_PREFERENCES templates carry exactly one «slot» marker.
// Polarity is what the negation-window rule assigns to the marker position.
struct GrammarTemplate {
  UserIntent intent = UserIntent::kUnk;
  std::string text;
  std::optional<Slot> slot;
  int polarity = +1;
};

// File: INTENT<TAB>slot-or-"-"<TAB>template per line, '#' comments.
class Grammar {
 public:
  static Grammar load(const std::string& path);
  static Grammar parse(const std::string& content);

  const std::vector<GrammarTemplate>& templates() const { return templates_; }
  std::vector<const GrammarTemplate*> select(UserIntent intent, std::optional<Slot> slot = {},
                                             std::optional<int> polarity = {}) const;
  // Throws GrammarCoverageError naming the first missing intent or
  // (intent, slot) combination.
  void check_coverage() const;

 private:
  std::vector<GrammarTemplate> templates_;
};

// Slot fillers sampled by the generator: catalog surface forms (original
// casing) minus stoplisted phrases; years include decades.
struct Fillers {
  std::array<std::vector<std::string>, kNumSlots> by_slot;
  static Fillers from_catalog(const Catalog& catalog, const Lexicons& lexicons);
};

// Substitutes the filler into the template marker and derives gold tags from
// the filler's byte range.
LabeledRecord realize_template(const GrammarTemplate& tmpl, const std::string& filler);

// Records: n_per_intent for each of the ten marker-free intents, n_per_slot
// for each (REVEAL|REMOVE_PREFERENCES, slot) pair. Templates and fillers are
// drawn uniformly. Deterministic under seed.
LabeledCorpus generate_corpus(const Grammar& grammar, const Fillers& fillers,
                              std::size_t n_per_intent, std::size_t n_per_slot,
                              std::uint64_t seed);

// Surface text for a simulated user act. The first slot value picks a
// template of matching slot and polarity; INQUIRE prefers a template whose
// cue words request the same slots.
std::string render_user_text(const DialogueAct& act, const Grammar& grammar, Rng& rng);

}  // namespace moviebot::nlu
