#include "moviebot/recsys/recommender.hpp"

#include <algorithm>
#include <charconv>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot {

bool item_matches(const Catalog& catalog, std::size_t pos, Slot slot,
                  const std::string& value) {
  const auto& n = catalog.normalized(pos);
  const auto& item = catalog.items()[pos];
  switch (slot) {
    case Slot::kGenre:
      return n.genres.count(value) > 0;
    case Slot::kDirector:
      return n.director == value;
    case Slot::kActor:
      return n.actors.count(value) > 0;
    case Slot::kKeyword:
      return n.keywords.count(value) > 0;
    case Slot::kTitle:
      return n.title == value;
    case Slot::kYear: {
      std::string digits = value;
      const bool decade = !digits.empty() && digits.back() == 's';
      if (decade) digits.pop_back();
      int year = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), year);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) return false;
      return decade ? item.year / 10 == year / 10 : item.year == year;
    }
  }
  return false;
}

namespace {

bool passes(const Catalog& catalog, std::size_t pos, const Frame& frame) {
  for (auto slot : kAllSlots) {
    for (const auto& entry : frame[index_of(slot)]) {
      const bool match = item_matches(catalog, pos, slot, entry.value);
      if (entry.polarity < 0) {
        if (match) return false;
      } else if (slot != Slot::kTitle && !match) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

std::vector<const Item*> recommend(const Catalog& catalog, const Frame& frame,
                                   const std::set<std::string>& exclude, std::size_t k) {
  if (k == 0) throw ConfigError("recommend: k must be >= 1");
  std::vector<const Item*> candidates;
  for (std::size_t pos = 0; pos < catalog.size(); ++pos) {
    const auto& item = catalog.items()[pos];
    if (exclude.count(item.id)) continue;
    if (passes(catalog, pos, frame)) candidates.push_back(&item);
  }
  auto better = [](const Item* a, const Item* b) {
    if (a->rating != b->rating) return a->rating > b->rating;
    if (a->popularity_rank != b->popularity_rank) return a->popularity_rank < b->popularity_rank;
    return a->id < b->id;
  };
  if (candidates.size() > k) {
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), better);
    candidates.resize(k);
  } else {
    std::sort(candidates.begin(), candidates.end(), better);
  }
  return candidates;
}

std::size_t count_matches(const Catalog& catalog, const Frame& frame) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < catalog.size(); ++pos) n += passes(catalog, pos, frame);
  return n;
}

std::string explain_recommendation(const Catalog& catalog, const Item& item,
                                   const Frame& frame) {
  std::size_t pos = 0;
  while (pos < catalog.size() && &catalog.items()[pos] != &item) ++pos;
  if (pos == catalog.size()) {
    for (pos = 0; pos < catalog.size(); ++pos) {
      if (catalog.items()[pos].id == item.id) break;
    }
  }
  std::vector<std::string> reasons;
  for (auto slot : kAllSlots) {
    if (slot == Slot::kTitle) continue;
    for (const auto& entry : frame[index_of(slot)]) {
      if (entry.polarity > 0 && pos < catalog.size() &&
          item_matches(catalog, pos, slot, entry.value)) {
        reasons.push_back(std::string(name(slot)) + " " + entry.value);
      }
    }
  }
  if (reasons.empty()) return "It is one of the highest rated movies in the catalog.";
  return "Recommended because you asked for " + join(reasons, ", ") + ".";
}

}  // namespace moviebot
