#pragma once

#include <cstdint>
#include <random>

namespace kbc {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named streams derived from one run seed. Keeping the streams separate makes
// shuffling, initialization and sampling independently reproducible.
namespace seed_stream {
constexpr std::uint64_t kInit = 0x01;
constexpr std::uint64_t kShuffle = 0x02;
constexpr std::uint64_t kSampler = 0x03;
constexpr std::uint64_t kLsh = 0x04;
constexpr std::uint64_t kTriple = 0x05;
}  // namespace seed_stream

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

}  // namespace kbc
