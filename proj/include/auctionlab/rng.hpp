#pragma once

// Counter-based random streams. Every draw is a pure function of a stream
// key and a draw index, so Monte Carlo workloads can be partitioned across
// threads without changing a single sample.

#include <cstdint>

namespace auctionlab {

// SplitMix64 finalizer (Stafford mix 13).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream key derived from a master seed and a tag. Chain calls
// to derive sub-streams (e.g. per bidder, per replication).
inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// n-th uniform draw in [0,1) of the stream `key`.
inline double uniform01(std::uint64_t key, std::uint64_t n) noexcept {
  return static_cast<double>(mix64(key + n * 0x9e3779b97f4a7c15ULL) >> 11) * 0x1.0p-53;
}

}  // namespace auctionlab
