#include "omegastar/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace omegastar {

Factorization::Factorization(std::vector<PrimePower> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].prime < 2 || entries_[i].exponent == 0 ||
        (i > 0 && entries_[i - 1].prime >= entries_[i].prime)) {
      throw std::invalid_argument("malformed factorization");
    }
  }
}

unsigned Factorization::valuation(std::uint64_t p) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), p,
      [](const PrimePower& pp, std::uint64_t q) { return pp.prime < q; });
  return (it != entries_.end() && it->prime == p) ? it->exponent : 0;
}

std::uint64_t Factorization::value() const {
  u128 v = 1;
  for (const auto& [p, e] : entries_) v = checked_mul(v, checked_pow(p, e));
  return narrow_u64(v);
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  if (a == 0) return b;
  if (b == 0) return a;
  const int shift = std::countr_zero(a | b);
  a >>= std::countr_zero(a);
  do {
    b >>= std::countr_zero(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

u128 gcd(u128 a, u128 b) {
  if ((a >> 64) == 0 && (b >> 64) == 0) {
    return gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  }
  while (b != 0) {
    u128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

u128 lcm(u128 a, u128 b) {
  if (a == 0 || b == 0) throw std::invalid_argument("lcm of zero");
  return checked_mul(a / gcd(a, b), b);
}

u128 lcm_of(std::span<const std::uint64_t> values) {
  u128 acc = 1;
  for (auto v : values) acc = lcm(acc, v);
  return acc;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

namespace {

constexpr std::array<std::uint64_t, 12> kSmallPrimes = {2,  3,  5,  7,  11, 13,
                                                        17, 19, 23, 29, 31, 37};

bool miller_rabin_witness(std::uint64_t n, std::uint64_t d, int s,
                          std::uint64_t a) {
  std::uint64_t x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int r = 1; r < s; ++r) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

std::uint64_t pollard_brent(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    const std::uint64_t m = 128;
    std::uint64_t r = 1;
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      do {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  std::uint64_t d = pollard_brent(n);
  split(d, out);
  split(n / d, out);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (auto p : kSmallPrimes) {
    if (n % p == 0) return n == p;
  }
  if (n < 37 * 37) return true;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // The first twelve primes are a complete witness set below 3.3e24.
  for (auto a : kSmallPrimes) {
    if (miller_rabin_witness(n, d, s, a)) return false;
  }
  return true;
}

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize(0)");
  std::vector<PrimePower> entries;
  auto take = [&](std::uint64_t p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e != 0) entries.push_back({p, e});
  };
  take(2);
  take(3);
  for (std::uint64_t p = 5; p <= 1000 && p * p <= n; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) {
    std::vector<std::uint64_t> big;
    if (n < 1000 * 1000) {
      big.push_back(n);
    } else {
      split(n, big);
    }
    std::sort(big.begin(), big.end());
    for (std::size_t i = 0; i < big.size();) {
      std::size_t j = i;
      while (j < big.size() && big[j] == big[i]) ++j;
      entries.push_back({big[i], static_cast<unsigned>(j - i)});
      i = j;
    }
  }
  return Factorization(std::move(entries));
}

std::vector<std::uint64_t> divisors(const Factorization& f) {
  std::vector<std::uint64_t> out{1};
  for (const auto& [p, e] : f) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (unsigned i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t euler_phi(const Factorization& f) {
  std::uint64_t r = 1;
  for (const auto& [p, e] : f) {
    r *= p - 1;
    for (unsigned i = 1; i < e; ++i) r *= p;
  }
  return r;
}

std::uint64_t euler_phi(std::uint64_t n) { return euler_phi(factorize(n)); }

int mobius(const Factorization& f) {
  for (const auto& pp : f) {
    if (pp.exponent > 1) return 0;
  }
  return (f.size() % 2 == 0) ? 1 : -1;
}

int mobius(std::uint64_t n) { return mobius(factorize(n)); }

u128 binomial(unsigned n, unsigned r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  u128 c = 1;
  for (unsigned i = 1; i <= r; ++i) {
    // c * (n - r + i) is divisible by i after the multiplication.
    const u128 g = gcd(c, static_cast<u128>(i));
    c = checked_mul(c / g, (n - r + i) / (i / g));
  }
  return c;
}

u128 tau_l(const Factorization& f, unsigned l) {
  if (l == 0) throw std::invalid_argument("tau_l requires l >= 1");
  u128 r = 1;
  for (const auto& pp : f) r = checked_mul(r, binomial(pp.exponent + l - 1, l - 1));
  return r;
}

u128 tau_l(std::uint64_t n, unsigned l) { return tau_l(factorize(n), l); }

unsigned valuation(std::uint64_t n, std::uint64_t p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  unsigned e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

}  // namespace omegastar
