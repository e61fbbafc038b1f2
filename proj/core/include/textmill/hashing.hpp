#pragma once

#include <cstdint>
#include <string_view>

namespace textmill {

// splitmix64 finalizer; full avalanche over 64 bits.
std::uint64_t mix64(std::uint64_t x);

// Seeded FNV-1a with a mix64 finalizer. Stable across platforms and runs:
// pure byte arithmetic, no locale or pointer-size dependence.
std::uint64_t hash64(std::string_view data, std::uint64_t seed = 0);

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

// Deterministic uniform double in [0,1) from the top 53 bits of a raw draw.
double to_unit_interval(std::uint64_t raw);

}  // namespace textmill
