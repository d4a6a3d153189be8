#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>

namespace moviebot::gateway {

inline constexpr std::uint32_t kDefaultPbkdf2Iterations = 100000;
inline constexpr std::string_view kKdfName = "PBKDF2-HMAC-SHA256";

struct AuthRecord {
  std::string user_id;
  std::string salt_hex;    // 16 random bytes
  std::string digest_hex;  // 32 bytes
  std::uint32_t iterations = kDefaultPbkdf2Iterations;
};

// Random bytes from the OpenSSL CSPRNG, hex encoded.
std::string random_hex(std::size_t bytes);

std::string pbkdf2_hex(std::string_view password, std::string_view salt_hex,
                       std::uint32_t iterations);

// Credentials in a JSON-lines file: a header line naming the KDF, then one
// record per user. Only salts and digests are written. Thread-safe.
class AuthStore {
 public:
  explicit AuthStore(std::filesystem::path file,
                     std::uint32_t iterations = kDefaultPbkdf2Iterations);

  // UserExistsError; ConfigError for an empty user id or password.
  void register_user(const std::string& user_id, const std::string& password);
  // UnknownUserError or BadCredentials. The digest comparison is constant
  // time.
  void verify(const std::string& user_id, const std::string& password) const;
  bool exists(const std::string& user_id) const;

 private:
  std::filesystem::path file_;
  std::uint32_t iterations_;
  mutable std::mutex mu_;
  std::map<std::string, AuthRecord> records_;
};

}  // namespace moviebot::gateway
