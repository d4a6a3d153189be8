#include "moviebot/nlu/tags.hpp"

#include "moviebot/util/errors.hpp"

namespace moviebot::nlu {

TagSet::TagSet(std::vector<Tag> tags) : tags_(std::move(tags)) {
  if (tags_.empty() || tags_[0].kind != Kind::kOutside) {
    throw ConfigError("tag 0 must be O");
  }
}

TagSet TagSet::bio(const std::vector<Slot>& slots) {
  std::vector<Tag> tags{{Kind::kOutside, Slot::kGenre}};
  for (auto s : slots) {
    tags.push_back({Kind::kBegin, s});
    tags.push_back({Kind::kInside, s});
  }
  return TagSet(std::move(tags));
}

const TagSet& TagSet::standard() {
  static const TagSet kStandard =
      bio(std::vector<Slot>(kAllSlots.begin(), kAllSlots.end()));
  return kStandard;
}

bool TagSet::allowed(std::size_t prev, std::size_t cur) const {
  const auto& c = tags_[cur];
  if (c.kind != Kind::kInside) return true;
  if (prev >= tags_.size()) return false;
  const auto& p = tags_[prev];
  return p.kind != Kind::kOutside && p.slot == c.slot;
}

std::string TagSet::name(std::size_t k) const {
  const auto& t = tags_[k];
  switch (t.kind) {
    case Kind::kOutside:
      return "O";
    case Kind::kBegin:
      return "B-" + std::string(moviebot::name(t.slot));
    case Kind::kInside:
      return "I-" + std::string(moviebot::name(t.slot));
  }
  return "?";
}

std::optional<std::size_t> TagSet::parse(std::string_view tag) const {
  for (std::size_t k = 0; k < tags_.size(); ++k) {
    if (name(k) == tag) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> TagSet::begin_tag(Slot slot) const {
  for (std::size_t k = 0; k < tags_.size(); ++k) {
    if (tags_[k].kind == Kind::kBegin && tags_[k].slot == slot) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> TagSet::inside_tag(Slot slot) const {
  for (std::size_t k = 0; k < tags_.size(); ++k) {
    if (tags_[k].kind == Kind::kInside && tags_[k].slot == slot) return k;
  }
  return std::nullopt;
}

bool TagSet::well_formed(const std::vector<int>& tags) const {
  std::size_t prev = size();
  for (int t : tags) {
    if (t < 0 || static_cast<std::size_t>(t) >= size()) return false;
    if (!allowed(prev, static_cast<std::size_t>(t))) return false;
    prev = static_cast<std::size_t>(t);
  }
  return true;
}

std::vector<SlotSpan> spans_from_tags(const TagSet& tags, const std::vector<int>& seq) {
  std::vector<SlotSpan> out;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto& tag = tags[static_cast<std::size_t>(seq[t])];
    if (tag.kind == TagSet::Kind::kBegin) {
      out.push_back({tag.slot, {t, t + 1}});
    } else if (tag.kind == TagSet::Kind::kInside && !out.empty() &&
               out.back().slot == tag.slot && out.back().span.end == t) {
      out.back().span.end = t + 1;
    }
  }
  return out;
}

}  // namespace moviebot::nlu
