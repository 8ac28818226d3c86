#include "d3ap/sieve_cache.hpp"

#include <cstring>
#include <fstream>
#include <string>

namespace d3ap {

namespace {

constexpr char kMagic[4] = {'D', '3', 'E', 'Q'};

template <typename T>
void write_raw(std::ofstream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
bool read_raw(std::ifstream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  return in.gcount() == static_cast<std::streamsize>(count * sizeof(T));
}

}  // namespace

std::filesystem::path sieve_cache_path(const std::filesystem::path& dir, std::uint64_t limit) {
  return dir / ("d3sieve_" + std::to_string(limit) + ".bin");
}

void save_sieve(const SieveTable& t, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_sieve: cannot open " + file.string());
  out.write(kMagic, 4);
  std::uint32_t version = kSieveCacheVersion;
  write_raw(out, &version, 1);
  write_raw(out, &t.limit, 1);
  write_raw(out, t.d3.data() + 1, t.limit);
  write_raw(out, t.mu.data() + 1, t.limit);
  write_raw(out, t.phi.data() + 1, t.limit);
  write_raw(out, t.spf.data() + 1, t.limit);
  if (!out) throw std::runtime_error("save_sieve: short write to " + file.string());
}

std::optional<SieveTable> load_sieve(const std::filesystem::path& file, std::uint64_t expected_limit) {
  std::error_code ec;
  auto size = std::filesystem::file_size(file, ec);
  if (ec) return std::nullopt;
  std::uint64_t payload = expected_limit * (sizeof(std::uint32_t) + sizeof(std::int8_t) +
                                            sizeof(std::uint64_t) + sizeof(std::uint32_t));
  if (size != 4 + sizeof(std::uint32_t) + sizeof(std::uint64_t) + payload) return std::nullopt;

  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;

  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t limit = 0;
  if (!read_raw(in, magic, 4) || std::memcmp(magic, kMagic, 4) != 0) return std::nullopt;
  if (!read_raw(in, &version, 1) || version != kSieveCacheVersion) return std::nullopt;
  if (!read_raw(in, &limit, 1) || limit != expected_limit) return std::nullopt;

  SieveTable t;
  t.limit = limit;
  t.d3.assign(limit + 1, 0);
  t.mu.assign(limit + 1, 0);
  t.phi.assign(limit + 1, 0);
  t.spf.assign(limit + 1, 0);
  if (!read_raw(in, t.d3.data() + 1, limit)) return std::nullopt;
  if (!read_raw(in, t.mu.data() + 1, limit)) return std::nullopt;
  if (!read_raw(in, t.phi.data() + 1, limit)) return std::nullopt;
  if (!read_raw(in, t.spf.data() + 1, limit)) return std::nullopt;

  // spot invariants
  if (t.d3[1] != 1 || t.mu[1] != 1 || t.phi[1] != 1 || t.spf[1] != 1) return std::nullopt;
  if (limit >= 2 && (t.d3[2] != 3 || t.mu[2] != -1 || t.phi[2] != 1 || t.spf[2] != 2))
    return std::nullopt;
  return t;
}

CachedSieve load_or_build_sieve(std::uint64_t limit, const std::filesystem::path& dir) {
  auto file = sieve_cache_path(dir, limit);
  if (auto t = load_sieve(file, limit)) return {std::move(*t), true};
  CachedSieve c{build_sieve(limit), false};
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  try {
    save_sieve(c.table, file);
  } catch (const std::exception&) {
    // cache write failure is not fatal; the table is still usable
  }
  return c;
}

}  // namespace d3ap
