#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "moviebot/core/state.hpp"
#include "moviebot/recsys/catalog.hpp"

namespace moviebot {

// Strict AND filter over the frame, then rating desc, popularity_rank asc,
// id asc. Positive title preferences do not filter (a liked title is not a
// request for that exact movie); negative titles exclude the item.
// An empty result means NO_RESULTS.
std::vector<const Item*> recommend(const Catalog& catalog, const Frame& frame,
                                   const std::set<std::string>& exclude, std::size_t k);

// Number of items passing the frame filter (before exclusion).
std::size_t count_matches(const Catalog& catalog, const Frame& frame);

// Whether the item at catalog position pos satisfies one frame value.
bool item_matches(const Catalog& catalog, std::size_t pos, Slot slot,
                  const std::string& value);

// Human-readable reason naming the positive frame values the item matches.
std::string explain_recommendation(const Catalog& catalog, const Item& item,
                                   const Frame& frame);

}  // namespace moviebot
