#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace interbank {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a.
std::uint64_t hash_string(std::string_view text);

/// Independent stream for (master_seed, key, counter). The same triple always
/// yields the same sequence, whatever else has been drawn elsewhere.
Rng make_stream(std::uint64_t master_seed, std::uint64_t key, std::uint64_t counter);

// Stream keys.
inline constexpr std::uint64_t kTrialStream = 0x7472'6961'6c00'0001ULL;
inline constexpr std::uint64_t kBootstrapStream = 0x626f'6f74'0000'0002ULL;

}  // namespace interbank
