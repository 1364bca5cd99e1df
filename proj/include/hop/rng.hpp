#pragma once

#include <cstdint>
#include <random>

namespace hop {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; maps any 64-bit value to a well-mixed one.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent random stream from (master_seed, stream_index).
// Counter-based: the stream depends only on its index, never on how many
// other streams were created or in which order, so parallel schedules
// cannot change results.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  const std::uint64_t a = mix64(master_seed ^ mix64(2 * stream_index));
  const std::uint64_t b = mix64(master_seed ^ mix64(2 * stream_index + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

// Stream-index offsets so different consumers of one master seed never collide.
inline constexpr std::uint64_t kStreamBlockAux = 1ull << 40;

}  // namespace hop
