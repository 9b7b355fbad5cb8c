#pragma once

#include <cstdint>

namespace degroot::rng {

// Counter-based generator in the SplitMix64 family. Every draw is a pure
// function of (key, counter), so trials can be evaluated in any order -- or in
// parallel -- and still produce bit-identical streams.

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// i-th output of the SplitMix64 sequence whose state starts at `key`.
inline std::uint64_t at(std::uint64_t key, std::uint64_t counter) {
  return mix(key + (counter + 1) * kGamma);
}

// Derive an independent stream key (per trial, per purpose, ...).
inline std::uint64_t derive(std::uint64_t key, std::uint64_t salt) {
  return mix(key ^ mix(salt + kGamma));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(at(key, counter) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes counter slots 2i and 2i+1.
double normal(std::uint64_t key, std::uint64_t i);

}  // namespace degroot::rng
