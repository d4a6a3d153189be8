#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moviebot/core/dialogue_act.hpp"
#include "moviebot/core/vocab.hpp"

namespace moviebot::nlu {

// BIO tag alphabet. Tag 0 is always O. The production alphabet is
// O, then B-s, I-s for each slot in vocabulary order (13 tags); tests build
// reduced alphabets over arbitrary slot subsets.
class TagSet {
 public:
  enum class Kind : std::uint8_t { kOutside, kBegin, kInside };
  struct Tag {
    Kind kind = Kind::kOutside;
    Slot slot = Slot::kGenre;
  };

  // O, B-s0, I-s0, B-s1, I-s1, ...
  static TagSet bio(const std::vector<Slot>& slots);
  static const TagSet& standard();
  // Explicit alphabet; tags[0] must be O.
  explicit TagSet(std::vector<Tag> tags);

  std::size_t size() const { return tags_.size(); }
  const Tag& operator[](std::size_t k) const { return tags_[k]; }
  bool is_outside(std::size_t k) const { return tags_[k].kind == Kind::kOutside; }

  // prev == size() denotes the start state. I-s may only follow B-s or I-s.
  bool allowed(std::size_t prev, std::size_t cur) const;

  std::string name(std::size_t k) const;
  std::optional<std::size_t> parse(std::string_view tag) const;
  std::optional<std::size_t> begin_tag(Slot slot) const;
  std::optional<std::size_t> inside_tag(Slot slot) const;

  bool well_formed(const std::vector<int>& tags) const;

 private:
  std::vector<Tag> tags_;
};

inline constexpr std::size_t kNumStandardTags = 1 + 2 * kNumSlots;

struct SlotSpan {
  Slot slot;
  TokenSpan span;
  bool operator==(const SlotSpan&) const = default;
};

// Decodes BIO tags into spans. Assumes well-formed input.
std::vector<SlotSpan> spans_from_tags(const TagSet& tags, const std::vector<int>& seq);

}  // namespace moviebot::nlu
