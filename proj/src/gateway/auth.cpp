#include "moviebot/gateway/auth.hpp"

#include <fstream>

#include <json.hpp>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include "moviebot/util/errors.hpp"

namespace moviebot::gateway {

using nlohmann::json;

namespace {

std::string to_hex(const unsigned char* p, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kDigits[p[i] >> 4];
    out[2 * i + 1] = kDigits[p[i] & 15];
  }
  return out;
}

std::string from_hex(std::string_view hex) {
  if (hex.size() % 2) throw ParseError("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw ParseError("bad hex digit");
  };
  std::string out(hex.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<char>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
  }
  return out;
}

json header(std::uint32_t iterations) {
  return {{"format", "moviebot.auth"}, {"version", 1}, {"kdf", kKdfName}, {"iterations", iterations}};
}

}  // namespace

std::string random_hex(std::size_t bytes) {
  std::string buf(bytes, '\0');
  if (RAND_bytes(reinterpret_cast<unsigned char*>(buf.data()), static_cast<int>(bytes)) != 1) {
    throw Error("random number generator failure");
  }
  return to_hex(reinterpret_cast<const unsigned char*>(buf.data()), bytes);
}

std::string pbkdf2_hex(std::string_view password, std::string_view salt_hex,
                       std::uint32_t iterations) {
  const auto salt = from_hex(salt_hex);
  unsigned char out[32];
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                        reinterpret_cast<const unsigned char*>(salt.data()),
                        static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                        sizeof out, out) != 1) {
    throw Error("PBKDF2 failure");
  }
  return to_hex(out, sizeof out);
}

AuthStore::AuthStore(std::filesystem::path file, std::uint32_t iterations)
    : file_(std::move(file)), iterations_(iterations) {
  if (iterations_ < kDefaultPbkdf2Iterations) {
    throw ConfigError("PBKDF2 needs at least " + std::to_string(kDefaultPbkdf2Iterations) +
                      " iterations");
  }
  if (!std::filesystem::exists(file_)) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    std::ofstream out(file_);
    if (!out) throw StorageError("cannot create credential store " + file_.string());
    out << header(iterations_).dump() << '\n';
    return;
  }
  std::ifstream in(file_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("credential store: ") + e.what(), lineno);
    }
    if (lineno == 1) {
      if (j.value("format", "") != "moviebot.auth" || j.value("kdf", "") != kKdfName) {
        throw ParseError("credential store header does not match " + std::string(kKdfName), 1);
      }
      continue;
    }
    AuthRecord r{j.at("user").get<std::string>(), j.at("salt").get<std::string>(),
                 j.at("digest").get<std::string>(), j.at("iterations").get<std::uint32_t>()};
    records_[r.user_id] = r;
  }
}

void AuthStore::register_user(const std::string& user_id, const std::string& password) {
  if (user_id.empty() || password.empty()) throw ConfigError("user id and password must be non-empty");
  AuthRecord r{user_id, random_hex(16), "", iterations_};
  r.digest_hex = pbkdf2_hex(password, r.salt_hex, r.iterations);
  std::lock_guard lock(mu_);
  if (records_.count(user_id)) throw UserExistsError("user '" + user_id + "' already exists");
  std::ofstream out(file_, std::ios::app);
  out << json{{"user", r.user_id}, {"salt", r.salt_hex}, {"digest", r.digest_hex},
              {"iterations", r.iterations}}
             .dump()
      << '\n';
  if (!out) throw StorageError("failed writing credential store");
  records_[user_id] = std::move(r);
}

bool AuthStore::exists(const std::string& user_id) const {
  std::lock_guard lock(mu_);
  return records_.count(user_id) > 0;
}

void AuthStore::verify(const std::string& user_id, const std::string& password) const {
  AuthRecord r;
  {
    std::lock_guard lock(mu_);
    auto it = records_.find(user_id);
    if (it == records_.end()) throw UnknownUserError("unknown user '" + user_id + "'");
    r = it->second;
  }
  const auto digest = pbkdf2_hex(password, r.salt_hex, r.iterations);
  if (digest.size() != r.digest_hex.size() ||
      CRYPTO_memcmp(digest.data(), r.digest_hex.data(), digest.size()) != 0) {
    throw BadCredentials("wrong password");
  }
}

}  // namespace moviebot::gateway
