#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "moviebot/nlu/lexicon.hpp"
#include "moviebot/recsys/catalog.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot::nlu {

inline constexpr std::size_t kDefaultHashDim = std::size_t{1} << 18;
// Bumped whenever a feature template changes; stored in model sidecars.
inline constexpr int kFeatureTemplateVersion = 1;

// Hashed indices into [0, hash_dim). Duplicates are kept: a template that
// fires twice counts twice.
using FeatureList = std::vector<std::uint32_t>;

struct EncodedUtterance {
  std::vector<std::string> tokens;
  std::vector<FeatureList> token_features;  // one list per token
  FeatureList utterance_features;           // bag features for intent scoring
};

// Token templates (each string is hashed with hash64 under kFeatureHashSeed
// and reduced modulo hash_dim):
//   bias, w=, p1= p2= p3=, s1= s2= s3=, cap, digit, year,
//   lex:genre|person|keyword|title  with :B / :I position suffix,
//   neg (negation cue in the preceding window),
//   w-1= and w+1= (BOS / EOS at the edges)
// Utterance templates: bias, bow=, bigram=, first=, last=, len bucket,
//   has:<lexicon>, has:year, has:neg, has:quote, plus the same lexicon hits
//   without position.
class FeatureEncoder {
 public:
  FeatureEncoder(std::shared_ptr<const Lexicons> lexicons, std::shared_ptr<const Catalog> catalog,
                 std::size_t hash_dim = kDefaultHashDim);

  EncodedUtterance encode(std::string_view text) const;
  std::size_t hash_dim() const { return hash_dim_; }
  const Lexicons& lexicons() const { return *lexicons_; }

 private:
  std::uint32_t feature(std::string_view name) const;

  std::shared_ptr<const Lexicons> lexicons_;
  std::shared_ptr<const Catalog> catalog_;
  std::size_t hash_dim_;
  std::size_t max_phrase_;
  std::set<std::string> people_;
  std::set<std::string> title_ngrams_;
};

}  // namespace moviebot::nlu
