#include "moviebot/recsys/catalog.hpp"

#include <json.hpp>

#include "moviebot/util/errors.hpp"
#include "moviebot/util/text.hpp"

namespace moviebot {

using nlohmann::json;

Catalog::Catalog(std::vector<Item> items) : items_(std::move(items)) {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!by_id_.emplace(items_[i].id, i).second) {
      throw DuplicateIdError("duplicate item id '" + items_[i].id + "'");
    }
  }
  build_indexes();
}

void Catalog::build_indexes() {
  normalized_.clear();
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    Normalized n;
    for (const auto& g : item.genres) n.genres.insert(normalize_phrase(g));
    for (const auto& a : item.actors) n.actors.insert(normalize_phrase(a));
    for (const auto& k : item.keywords) n.keywords.insert(normalize_phrase(k));
    n.director = normalize_phrase(item.director);
    n.title = normalize_phrase(item.title);

    for (const auto& g : n.genres) genre_index_[g].push_back(i);
    for (const auto& a : n.actors) {
      actor_index_[a].push_back(i);
      person_index_[a].push_back(i);
    }
    if (!n.director.empty()) {
      director_index_[n.director].push_back(i);
      auto& p = person_index_[n.director];
      if (p.empty() || p.back() != i) p.push_back(i);
    }
    for (const auto& k : n.keywords) keyword_index_[k].push_back(i);
    if (!n.title.empty()) title_index_[n.title].push_back(i);

    const auto words = split(n.title, ' ');
    std::set<std::string> grams;
    for (std::size_t b = 0; b < words.size(); ++b) {
      for (std::size_t e = b + 1; e <= words.size(); ++e) {
        grams.insert(join_range(words, b, e));
      }
    }
    for (const auto& g : grams) title_ngram_index_[g].push_back(i);
    normalized_.push_back(std::move(n));
  }
}

const Item* Catalog::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

bool Catalog::operator==(const Catalog& other) const {
  return items_ == other.items_ && genre_index_ == other.genre_index_ &&
         person_index_ == other.person_index_ && keyword_index_ == other.keyword_index_ &&
         title_ngram_index_ == other.title_ngram_index_ &&
         title_index_ == other.title_index_;
}

namespace {

std::vector<std::string> string_array(const json& j, const char* key, std::size_t lineno) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ParseError(std::string("field '") + key + "' must be an array", lineno);
  for (const auto& v : arr) {
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must hold strings", lineno);
    out.push_back(v.get<std::string>());
  }
  return out;
}

Item parse_item(const std::string& line, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", lineno);
  Item item;
  try {
    item.id = j.at("id").get<std::string>();
    item.title = j.at("title").get<std::string>();
    item.year = j.at("year").get<int>();
    item.director = j.value("director", std::string{});
    item.rating = j.value("rating", 0.0);
    item.popularity_rank = j.value("popularity_rank", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad item field: ") + e.what(), lineno);
  }
  item.genres = string_array(j, "genres", lineno);
  item.actors = string_array(j, "actors", lineno);
  item.keywords = string_array(j, "keywords", lineno);
  if (item.id.empty()) throw ParseError("empty id", lineno);
  if (item.title.empty()) throw ParseError("empty title", lineno);
  if (item.year < 1900 || item.year > 2100) throw ParseError("year out of range", lineno);
  if (item.rating < 0.0 || item.rating > 10.0) throw ParseError("rating out of range", lineno);
  return item;
}

}  // namespace

Catalog Catalog::load(const std::string& path) {
  std::vector<Item> items;
  std::map<std::string, std::size_t> seen;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto item = parse_item(line, lineno);
    if (auto [it, inserted] = seen.emplace(item.id, lineno); !inserted) {
      throw DuplicateIdError("duplicate item id '" + item.id + "' at line " +
                             std::to_string(lineno) + " (first at line " +
                             std::to_string(it->second) + ")");
    }
    items.push_back(std::move(item));
  }
  return Catalog(std::move(items));
}

std::string item_to_json_line(const Item& item) {
  json j = {{"id", item.id},         {"title", item.title},
            {"year", item.year},     {"genres", item.genres},
            {"director", item.director}, {"actors", item.actors},
            {"keywords", item.keywords}, {"rating", item.rating},
            {"popularity_rank", item.popularity_rank}};
  return j.dump();
}

}  // namespace moviebot
