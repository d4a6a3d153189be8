#include "moviebot/nlu/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot::nlu {
namespace {

constexpr std::string_view kOpen = "\xC2\xAB";   // «
constexpr std::string_view kClose = "\xC2\xBB";  // »

bool marker_free(UserIntent intent) {
  return slot_constraint(intent) != SlotConstraint::kSlotRequired;
}

struct Split {
  std::string prefix, suffix;
};

Split split_marker(const GrammarTemplate& t) {
  const auto open = t.text.find(kOpen);
  const auto close = t.text.find(kClose, open);
  return {t.text.substr(0, open), t.text.substr(close + kClose.size())};
}

}  // namespace

void validate_record(const LabeledRecord& r) {
  const auto tokens = tokenize_words(r.text);
  if (tokens.empty()) throw InvalidGoldError("record has no tokens: '" + r.text + "'");
  if (tokens.size() != r.tags.size()) {
    throw InvalidGoldError("tag count " + std::to_string(r.tags.size()) + " != token count " +
                           std::to_string(tokens.size()) + " for '" + r.text + "'");
  }
  const auto seq = tag_indices(r);
  const auto& ts = TagSet::standard();
  if (!ts.well_formed(seq)) throw InvalidGoldError("malformed BIO for '" + r.text + "'");
  bool any = std::any_of(seq.begin(), seq.end(), [](int y) { return y != 0; });
  const auto c = slot_constraint(r.intent);
  if ((c == SlotConstraint::kSlotRequired && !any) || (c == SlotConstraint::kSlotFree && any)) {
    throw InvalidGoldError("tags violate the constraint of " + std::string(name(r.intent)) +
                           " for '" + r.text + "'");
  }
}

std::vector<int> tag_indices(const LabeledRecord& r) {
  std::vector<int> seq;
  for (const auto& t : r.tags) {
    const auto k = TagSet::standard().parse(t);
    if (!k) throw InvalidGoldError("unknown tag '" + t + "'");
    seq.push_back(static_cast<int>(*k));
  }
  return seq;
}

LabeledCorpus read_corpus(const std::string& path) {
  LabeledCorpus out;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError(path + ": expected 3 tab-separated fields", lineno);
    const auto intent = parse_user_intent(fields[0]);
    if (!intent) throw ParseError(path + ": unknown intent '" + fields[0] + "'", lineno);
    LabeledRecord r{*intent, fields[1], {}};
    for (const auto& t : split(fields[2], ' ')) {
      if (!t.empty()) r.tags.push_back(t);
    }
    try {
      validate_record(r);
    } catch (const InvalidGoldError& e) {
      throw ParseError(path + ": " + e.what(), lineno);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_corpus(const std::string& path, const LabeledCorpus& corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StorageError("cannot write corpus: " + path);
  out << "# intent\ttext\ttags\n";
  for (const auto& r : corpus) {
    out << name(r.intent) << '\t' << r.text << '\t' << join(r.tags, " ") << '\n';
  }
  if (!out) throw StorageError("failed writing corpus: " + path);
}

CorpusSplit split_corpus(const LabeledCorpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("train fraction must lie in [0, 1]");
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(corpus.size())));
  CorpusSplit out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.train : out.test).push_back(corpus[order[i]]);
  }
  return out;
}

Grammar Grammar::parse(const std::string& content) {
  Grammar g;
  std::size_t lineno = 0;
  for (const auto& raw : split(content, '\n')) {
    ++lineno;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("grammar line needs INTENT<TAB>slot-or--<TAB>template", lineno);
    }
    const auto intent = parse_user_intent(trim(fields[0]));
    if (!intent) throw ParseError("unknown intent in grammar", lineno);
    const auto slot_col = std::string(trim(fields[1]));
    std::optional<Slot> declared;
    if (slot_col != "-") {
      declared = parse_slot(slot_col);
      if (!declared) throw ParseError("unknown slot '" + slot_col + "'", lineno);
    }
    GrammarTemplate t;
    t.intent = *intent;
    t.text = std::string(trim(fields[2]));

    std::size_t markers = 0;
    for (auto pos = t.text.find(kOpen); pos != std::string::npos;
         pos = t.text.find(kOpen, pos + 1)) {
      ++markers;
      const auto close = t.text.find(kClose, pos);
      if (close == std::string::npos) throw ParseError("unterminated slot marker", lineno);
      const auto slot_name = t.text.substr(pos + kOpen.size(), close - pos - kOpen.size());
      const auto slot = parse_slot(slot_name);
      if (!slot) throw ParseError("unknown slot marker '" + slot_name + "'", lineno);
      t.slot = slot;
    }
    if (marker_free(t.intent) && markers != 0) {
      throw ParseError(std::string(name(t.intent)) + " templates take no slot marker", lineno);
    }
    if (!marker_free(t.intent) && markers != 1) {
      throw ParseError(std::string(name(t.intent)) + " templates need exactly one slot marker",
                       lineno);
    }
    if (t.slot != declared) throw ParseError("slot column disagrees with the marker", lineno);
    if (t.slot) {
      const auto rec = realize_template(t, "x");
      const auto words = tokenize_words(rec.text);
      std::size_t b = 0;
      while (b < rec.tags.size() && rec.tags[b] == "O") ++b;
      t.polarity = polarity_for_span(words, {b, b + 1});
    }
    if (tokenize_words(t.slot ? realize_template(t, "x").text : t.text).empty()) {
      throw ParseError("template has no words", lineno);
    }
    g.templates_.push_back(std::move(t));
  }
  return g;
}

Grammar Grammar::load(const std::string& path) { return parse(read_file(path)); }

std::vector<const GrammarTemplate*> Grammar::select(UserIntent intent, std::optional<Slot> slot,
                                                    std::optional<int> polarity) const {
  std::vector<const GrammarTemplate*> out;
  for (const auto& t : templates_) {
    if (t.intent != intent) continue;
    if (slot && t.slot != slot) continue;
    if (polarity && t.polarity != *polarity) continue;
    out.push_back(&t);
  }
  return out;
}

void Grammar::check_coverage() const {
  for (auto intent : kAllUserIntents) {
    if (marker_free(intent)) {
      if (select(intent).empty()) {
        throw GrammarCoverageError("grammar has no template for " + std::string(name(intent)));
      }
      continue;
    }
    for (auto slot : kAllSlots) {
      if (select(intent, slot).empty()) {
        throw GrammarCoverageError("grammar has no template for " + std::string(name(intent)) +
                                   " with slot " + std::string(name(slot)));
      }
    }
  }
}

Fillers Fillers::from_catalog(const Catalog& catalog, const Lexicons& lexicons) {
  std::array<std::set<std::string>, kNumSlots> sets;
  auto add = [&](Slot s, const std::string& v) {
    const auto norm = normalize_phrase(v);
    if (norm.empty() || lexicons.stopped(norm)) return;
    if (s == Slot::kTitle && lexicons.titles.count(norm) == 0) return;
    // A keyword spelled like a genre would get contradictory gold labels.
    if (s == Slot::kKeyword && lexicons.genres.count(norm)) return;
    sets[index_of(s)].insert(v);
  };
  for (const auto& item : catalog.items()) {
    for (const auto& g : item.genres) add(Slot::kGenre, g);
    add(Slot::kDirector, item.director);
    for (const auto& a : item.actors) add(Slot::kActor, a);
    for (const auto& k : item.keywords) add(Slot::kKeyword, k);
    add(Slot::kTitle, item.title);
    add(Slot::kYear, std::to_string(item.year));
    add(Slot::kYear, std::to_string(item.year / 10 * 10) + "s");
  }
  Fillers f;
  for (std::size_t s = 0; s < kNumSlots; ++s) f.by_slot[s].assign(sets[s].begin(), sets[s].end());
  return f;
}

LabeledRecord realize_template(const GrammarTemplate& tmpl, const std::string& filler) {
  LabeledRecord r;
  r.intent = tmpl.intent;
  if (!tmpl.slot) {
    r.text = tmpl.text;
    r.tags.assign(tokenize(r.text).size(), "O");
    return r;
  }
  const auto parts = split_marker(tmpl);
  r.text = parts.prefix + filler + parts.suffix;
  const std::size_t lo = parts.prefix.size(), hi = lo + filler.size();
  const auto& ts = TagSet::standard();
  const auto b_tag = ts.name(*ts.begin_tag(*tmpl.slot));
  const auto i_tag = ts.name(*ts.inside_tag(*tmpl.slot));
  bool started = false;
  for (const auto& tok : tokenize(r.text)) {
    const bool inside = tok.begin >= lo && tok.end <= hi;
    if (!inside && tok.begin < hi && tok.end > lo) {
      throw InvalidGoldError("filler '" + filler + "' fuses with template text");
    }
    r.tags.push_back(inside ? (started ? i_tag : b_tag) : "O");
    started = started || inside;
  }
  if (!started) throw InvalidGoldError("filler '" + filler + "' has no tokens");
  return r;
}

LabeledCorpus generate_corpus(const Grammar& grammar, const Fillers& fillers,
                              std::size_t n_per_intent, std::size_t n_per_slot,
                              std::uint64_t seed) {
  grammar.check_coverage();
  LabeledCorpus out;
  std::uint64_t stream = 0;
  for (auto intent : kAllUserIntents) {
    if (marker_free(intent)) {
      Rng rng(mix_seed(seed, stream++));
      const auto choices = grammar.select(intent);
      for (std::size_t n = 0; n < n_per_intent; ++n) {
        out.push_back(realize_template(*rng.pick(choices), ""));
      }
      continue;
    }
    for (auto slot : kAllSlots) {
      Rng rng(mix_seed(seed, stream++));
      const auto choices = grammar.select(intent, slot);
      const auto& pool = fillers.by_slot[index_of(slot)];
      if (pool.empty() && n_per_slot > 0) {
        throw GrammarCoverageError("no fillers available for slot " + std::string(name(slot)));
      }
      for (std::size_t n = 0; n < n_per_slot; ++n) {
        const auto* t = rng.pick(choices);
        out.push_back(realize_template(*t, rng.pick(pool)));
      }
    }
  }
  for (const auto& r : out) validate_record(r);
  return out;
}

std::string render_user_text(const DialogueAct& act, const Grammar& grammar, Rng& rng) {
  const auto* ui = std::get_if<UserIntent>(&act.intent);
  if (!ui) throw ConfigError("render_user_text needs a user act");
  const auto intent = *ui;
  if (marker_free(intent) || act.slot_values.empty()) {
    auto choices = grammar.select(intent);
    if (intent == UserIntent::kInquire && !act.requested.empty()) {
      std::vector<const GrammarTemplate*> matching;
      for (const auto* t : choices) {
        if (requested_slots_from_cues(tokenize_words(t->text)) == act.requested) {
          matching.push_back(t);
        }
      }
      if (!matching.empty()) choices = std::move(matching);
    }
    if (choices.empty()) {
      throw GrammarCoverageError("no template for " + std::string(name(intent)));
    }
    return rng.pick(choices)->text;
  }
  std::vector<std::string> pieces;
  for (const auto& sv : act.slot_values) {
    auto choices = grammar.select(intent, sv.slot, sv.polarity);
    if (choices.empty()) choices = grammar.select(intent, sv.slot);
    if (choices.empty()) {
      throw GrammarCoverageError("no template for " + std::string(name(intent)) + " with slot " +
                                 std::string(name(sv.slot)));
    }
    pieces.push_back(realize_template(*rng.pick(choices), sv.value).text);
  }
  return join(pieces, ". ");
}

}  // namespace moviebot::nlu
