#pragma once

#include <cstdint>
#include <string_view>

namespace moviebot {

inline constexpr std::uint64_t kFeatureHashSeed = 0x6D6F766965626F74ULL;  // "moviebot"

// FNV-1a over the bytes, offset basis xor'ed with the seed, followed by the
// splitmix64 finalizer for avalanche. Stable across platforms; changing it
// invalidates every serialized CRF model.
constexpr std::uint64_t hash64(std::string_view bytes,
                               std::uint64_t seed = kFeatureHashSeed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ seed;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

}  // namespace moviebot
