#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "d3ap/arith.hpp"

namespace d3ap {

// Binary sieve cache: header "D3EQ" | version u32 | limit u64 (all
// little-endian), then the four arrays for n = 1..limit in fixed order:
// d3 (u32), mu (i8), phi (u64), spf (u32). A cache that fails any header,
// size or spot-invariant check is rebuilt, never trusted.
inline constexpr std::uint32_t kSieveCacheVersion = 1;

std::filesystem::path sieve_cache_path(const std::filesystem::path& dir, std::uint64_t limit);

void save_sieve(const SieveTable& table, const std::filesystem::path& file);

std::optional<SieveTable> load_sieve(const std::filesystem::path& file, std::uint64_t expected_limit);

struct CachedSieve {
  SieveTable table;
  bool from_cache = false;
};

CachedSieve load_or_build_sieve(std::uint64_t limit, const std::filesystem::path& dir);

}  // namespace d3ap
