#pragma once

#include <cstdint>
#include <random>

namespace tpp {

using Rng = std::mt19937_64;

// Mixes a base seed with a stream tag so independent consumers draw from unrelated sequences.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

// Stream tags for derive_seed.
namespace seed_tag {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kPretrain = 2;
inline constexpr std::uint64_t kAugment = 3;
inline constexpr std::uint64_t kPrompt = 4;
inline constexpr std::uint64_t kBaseline = 5;
inline constexpr std::uint64_t kOrdering = 6;
inline constexpr std::uint64_t kIsolated = 7;
}  // namespace seed_tag

}  // namespace tpp
