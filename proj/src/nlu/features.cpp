#include "moviebot/nlu/features.hpp"

#include <algorithm>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/hash.hpp"

namespace moviebot::nlu {

FeatureEncoder::FeatureEncoder(std::shared_ptr<const Lexicons> lexicons,
                               std::shared_ptr<const Catalog> catalog, std::size_t hash_dim)
    : lexicons_(std::move(lexicons)), catalog_(std::move(catalog)), hash_dim_(hash_dim) {
  if (!lexicons_ || !catalog_) throw ConfigError("feature encoder needs lexicons and a catalog");
  if (hash_dim_ == 0 || hash_dim_ > (std::size_t{1} << 31)) {
    throw ConfigError("hash dimension out of range");
  }
  max_phrase_ = lexicons_->max_phrase_tokens();
  people_ = lexicons_->actors;
  people_.insert(lexicons_->directors.begin(), lexicons_->directors.end());
  for (const auto& [g, _] : catalog_->title_ngram_index()) title_ngrams_.insert(g);
}

std::uint32_t FeatureEncoder::feature(std::string_view name) const {
  return static_cast<std::uint32_t>(hash64(name, kFeatureHashSeed) % hash_dim_);
}

namespace {

// Quote characters ASCII and the common UTF-8 curly quotes.
bool has_quote(std::string_view text) {
  return text.find('"') != std::string_view::npos ||
         text.find("\xE2\x80\x9C") != std::string_view::npos ||
         text.find("\xE2\x80\x9D") != std::string_view::npos;
}

}  // namespace

EncodedUtterance FeatureEncoder::encode(std::string_view text) const {
  EncodedUtterance out;
  const auto toks = tokenize(text);
  const std::size_t n = toks.size();
  out.tokens.reserve(n);
  for (const auto& t : toks) out.tokens.push_back(t.text);
  out.token_features.resize(n);

  const auto& lex = *lexicons_;
  struct Source {
    const char* name;
    const std::set<std::string>* set;
  };
  const Source sources[] = {{"genre", &lex.genres},
                            {"person", &people_},
                            {"keyword", &lex.keywords},
                            {"title", &title_ngrams_}};

  auto& uf = out.utterance_features;
  uf.push_back(feature("u:bias"));
  for (const auto& src : sources) {
    for (const auto& m : match_phrases(out.tokens, *src.set, lex.stoplist, max_phrase_)) {
      for (std::size_t i = m.span.begin; i < m.span.end; ++i) {
        const std::string pos = i == m.span.begin ? ":B" : ":I";
        out.token_features[i].push_back(feature(std::string("lex:") + src.name + pos));
      }
      uf.push_back(feature(std::string("u:has:") + src.name));
    }
  }

  bool any_neg = false;
  bool any_year = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = out.tokens[i];
    auto& f = out.token_features[i];
    f.push_back(feature("bias"));
    f.push_back(feature("w=" + w));
    for (std::size_t k = 1; k <= 3 && k <= w.size(); ++k) {
      f.push_back(feature("p" + std::to_string(k) + "=" + w.substr(0, k)));
      f.push_back(feature("s" + std::to_string(k) + "=" + w.substr(w.size() - k)));
    }
    if (toks[i].capitalized) f.push_back(feature("cap"));
    if (std::any_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      f.push_back(feature("digit"));
    }
    if (is_year_token(w)) {
      f.push_back(feature("year"));
      any_year = true;
    }
    if (polarity_for_span(out.tokens, {i, i + 1}) < 0) f.push_back(feature("neg"));
    if (is_negation_cue(w)) any_neg = true;
    f.push_back(feature("w-1=" + (i == 0 ? std::string("<s>") : out.tokens[i - 1])));
    f.push_back(feature("w+1=" + (i + 1 == n ? std::string("</s>") : out.tokens[i + 1])));

    uf.push_back(feature("u:bow=" + w));
    if (i + 1 < n) uf.push_back(feature("u:bigram=" + w + " " + out.tokens[i + 1]));
  }
  if (n > 0) {
    uf.push_back(feature("u:first=" + out.tokens.front()));
    uf.push_back(feature("u:last=" + out.tokens.back()));
  }
  uf.push_back(feature("u:len=" + std::to_string(std::min<std::size_t>(n, 8))));
  if (any_year) uf.push_back(feature("u:has:year"));
  if (any_neg) uf.push_back(feature("u:has:neg"));
  if (has_quote(text)) uf.push_back(feature("u:has:quote"));
  return out;
}

}  // namespace moviebot::nlu
