#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "omegastar/arith.hpp"

namespace omegastar {

struct SieveOptions {
  /// Integers per segment during construction.
  std::size_t segment_length = std::size_t{1} << 22;
  /// Upper bound on the bytes a finished table may occupy.
  std::size_t memory_budget = std::size_t{1} << 30;
  /// 0 means resolve_threads() default.
  unsigned threads = 0;
};

/// All primes up to `limit`, increasing.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint32_t> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  std::uint32_t operator[](std::size_t i) const { return primes_[i]; }
  /// Binary search membership; n must not exceed limit().
  bool contains(std::uint64_t n) const;
  std::size_t memory_bytes() const { return primes_.capacity() * sizeof(std::uint32_t); }

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
};

/// Smallest prime factor for every 2 <= n <= limit.
class SpfTable {
 public:
  SpfTable() = default;
  SpfTable(std::uint64_t limit, std::vector<std::uint32_t> spf)
      : limit_(limit), spf_(std::move(spf)) {}

  std::uint64_t limit() const { return limit_; }
  std::uint32_t operator[](std::uint64_t n) const { return spf_[n]; }

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
};

/// counts[n] = #{d | n : d + 1 prime} for 1 <= n <= x.
class OmegaStarTable {
 public:
  using Counter = std::uint16_t;

  OmegaStarTable() = default;
  OmegaStarTable(std::uint64_t x, std::vector<Counter> counts);

  std::uint64_t x() const { return x_; }
  /// n in [1, x].
  Counter operator[](std::uint64_t n) const { return counts_[n]; }
  Counter at(std::uint64_t n) const;
  /// Counters for 1..x (index 0 of the span is n = 1).
  std::span<const Counter> counts() const {
    return std::span<const Counter>(counts_).subspan(1);
  }
  std::size_t memory_bytes() const { return counts_.capacity() * sizeof(Counter); }

  bool operator==(const OmegaStarTable&) const = default;

 private:
  std::uint64_t x_ = 0;
  std::vector<Counter> counts_;  // counts_[0] unused
};

PrimeTable build_primes(std::uint64_t limit, const SieveOptions& opts = {});
SpfTable build_spf(std::uint64_t limit, const SieveOptions& opts = {});

/// Strides multiples of p - 1 for every prime p <= x + 1, segment by segment.
OmegaStarTable build_omega_star(std::uint64_t x, const SieveOptions& opts = {});
OmegaStarTable build_omega_star(std::uint64_t x, const PrimeTable& primes,
                                const SieveOptions& opts = {});

/// Direct count from the divisors of n, independent of any table.
unsigned omega_star_single(std::uint64_t n);

/// Factorization by repeated smallest-prime-factor lookup; n <= spf.limit().
Factorization factorize(std::uint64_t n, const SpfTable& spf);

/// Little-endian dump: "OMST", u32 version, u64 x, x u16 counters.
void save_omega_star(const OmegaStarTable& table, const std::filesystem::path& path);
/// Verifies magic, version and payload length; throws std::runtime_error.
OmegaStarTable load_omega_star(const std::filesystem::path& path);

inline constexpr std::uint32_t kOmegaStarDumpVersion = 1;

}  // namespace omegastar
