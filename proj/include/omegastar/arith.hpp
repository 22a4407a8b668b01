#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "omegastar/wide.hpp"

namespace omegastar {

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  bool operator==(const PrimePower&) const = default;
};

/// Prime factorization with strictly increasing primes; empty means 1.
class Factorization {
 public:
  Factorization() = default;
  explicit Factorization(std::vector<PrimePower> entries);

  const std::vector<PrimePower>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Exponent of p (0 if absent).
  unsigned valuation(std::uint64_t p) const;
  /// Reassembled integer; throws std::range_error above 64 bits.
  std::uint64_t value() const;

  bool operator==(const Factorization&) const = default;

 private:
  std::vector<PrimePower> entries_;
};

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
u128 gcd(u128 a, u128 b);

/// lcm in widened arithmetic; throws std::range_error on overflow.
u128 lcm(u128 a, u128 b);
/// Left fold of lcm with widened intermediates.
u128 lcm_of(std::span<const std::uint64_t> values);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Trial division by small primes, then Pollard-Brent splitting.
/// Throws std::invalid_argument for n = 0.
Factorization factorize(std::uint64_t n);

/// All divisors in increasing order.
std::vector<std::uint64_t> divisors(const Factorization& f);

std::uint64_t euler_phi(std::uint64_t n);
std::uint64_t euler_phi(const Factorization& f);
int mobius(std::uint64_t n);
int mobius(const Factorization& f);

/// Binomial coefficient, exact; throws std::range_error on overflow.
u128 binomial(unsigned n, unsigned r);

/// Number of ordered l-tuples of positive integers with product n.
u128 tau_l(std::uint64_t n, unsigned l);
u128 tau_l(const Factorization& f, unsigned l);

/// v_p(n) for n >= 1.
unsigned valuation(std::uint64_t n, std::uint64_t p);

}  // namespace omegastar
