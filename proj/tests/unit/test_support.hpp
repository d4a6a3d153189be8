#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "moviebot/nlu/features.hpp"
#include "moviebot/nlu/lexicon.hpp"
#include "moviebot/recsys/catalog.hpp"

namespace testsupport {

inline std::string data_path(const std::string& rel) {
  return std::string(MOVIEBOT_DATA_DIR) + "/" + rel;
}

inline std::shared_ptr<const moviebot::Catalog> bundled_catalog() {
  static auto cat = std::make_shared<const moviebot::Catalog>(
      moviebot::Catalog::load(data_path("catalog/movies_100.jsonl")));
  return cat;
}

inline std::shared_ptr<const moviebot::nlu::Lexicons> bundled_lexicons() {
  static auto lex = std::make_shared<const moviebot::nlu::Lexicons>(
      moviebot::nlu::Lexicons::load(data_path("nlu"), *bundled_catalog()));
  return lex;
}

inline std::shared_ptr<const moviebot::nlu::FeatureEncoder> encoder(std::size_t dim) {
  return std::make_shared<const moviebot::nlu::FeatureEncoder>(bundled_lexicons(),
                                                               bundled_catalog(), dim);
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("moviebot_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testsupport
