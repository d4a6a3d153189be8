#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace moviebot {

struct Item {
  std::string id;
  std::string title;
  int year = 0;
  std::vector<std::string> genres;
  std::string director;
  std::vector<std::string> actors;
  std::vector<std::string> keywords;
  double rating = 0.0;
  int popularity_rank = 0;

  bool operator==(const Item&) const = default;
};

// Immutable after construction; share freely between threads.
//
// Index keys are normalized phrases (see normalize_phrase). Values are
// positions into items(), ascending.
class Catalog {
 public:
  using Postings = std::vector<std::size_t>;
  using Index = std::map<std::string, Postings>;

  Catalog() = default;
  explicit Catalog(std::vector<Item> items);

  // JSON-lines, one Item per line. Throws ParseError (with line number) or
  // DuplicateIdError. Blank lines are skipped.
  static Catalog load(const std::string& path);

  const std::vector<Item>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Item* find(const std::string& id) const;

  const Index& genre_index() const { return genre_index_; }
  const Index& person_index() const { return person_index_; }
  const Index& actor_index() const { return actor_index_; }
  const Index& director_index() const { return director_index_; }
  const Index& keyword_index() const { return keyword_index_; }
  // Contiguous word n-grams (n >= 1) of every title.
  const Index& title_ngram_index() const { return title_ngram_index_; }
  // Full normalized titles.
  const Index& title_index() const { return title_index_; }

  // Per-item normalized attribute sets, parallel to items().
  struct Normalized {
    std::set<std::string> genres;
    std::string director;
    std::set<std::string> actors;
    std::set<std::string> keywords;
    std::string title;
  };
  const Normalized& normalized(std::size_t pos) const { return normalized_[pos]; }

  bool operator==(const Catalog& other) const;

 private:
  void build_indexes();

  std::vector<Item> items_;
  std::vector<Normalized> normalized_;
  std::map<std::string, std::size_t> by_id_;
  Index genre_index_;
  Index person_index_;
  Index actor_index_;
  Index director_index_;
  Index keyword_index_;
  Index title_ngram_index_;
  Index title_index_;
};

std::string item_to_json_line(const Item& item);

}  // namespace moviebot
