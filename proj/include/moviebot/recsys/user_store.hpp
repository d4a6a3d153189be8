#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "moviebot/recsys/user_model.hpp"

namespace moviebot {

// Local append-only store: one JSON-lines event log per user plus an index
// file, each starting with a versioned header line.
//
//   <root>/index.jsonl          {"format":"moviebot.user-index","version":1}
//   <root>/users/u_<hex>.jsonl  {"format":"moviebot.user-log","version":1,"user":...}
//
// Writes for one user are serialized; different users proceed in parallel.
// Files only ever grow. Nothing is encrypted at rest.
class UserStore {
 public:
  explicit UserStore(std::filesystem::path root);

  // Creates an empty log for a new user. No-op when the user exists.
  void create(const std::string& user_id);
  bool exists(const std::string& user_id) const;
  std::vector<std::string> users() const;

  // Appends every event of the model not yet on disk. Throws StorageError
  // when the stored log is not a prefix of the model (stale copy).
  void persist(const UserModel& model);

  // Throws UnknownUserError when the user has no log.
  UserModel load(const std::string& user_id) const;

  std::filesystem::path user_file(const std::string& user_id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::mutex& user_mutex(const std::string& user_id) const;
  UserModel read_log(const std::string& user_id) const;
  void ensure_user_file(const std::string& user_id);

  std::filesystem::path root_;
  mutable std::mutex registry_mutex_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> user_mutexes_;
  std::mutex index_mutex_;
};

}  // namespace moviebot
