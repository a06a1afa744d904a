#pragma once

#include <cstdint>
#include <string>

namespace cagst {

// FNV-1a over bytes; stable across platforms, used to derive per-label and
// per-circuit RNG streams from one campaign seed.
std::uint64_t fnv1a(const std::string& bytes);

std::uint64_t splitmix64(std::uint64_t x);

inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag) {
  return splitmix64(seed ^ fnv1a(tag));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + index));
}

}  // namespace cagst
