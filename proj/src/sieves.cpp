#include "omegastar/sieves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "omegastar/io.hpp"
#include "omegastar/parallel.hpp"

namespace omegastar {

namespace {

constexpr std::uint64_t kMaxTableLimit = 4'000'000'000ULL;

std::vector<std::uint32_t> simple_sieve(std::uint64_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

void check_budget(std::size_t bytes, const SieveOptions& opts, const char* what) {
  if (bytes > opts.memory_budget) {
    throw ResourceError(std::string(what) + " needs " + std::to_string(bytes) +
                        " bytes, over the memory budget of " +
                        std::to_string(opts.memory_budget));
  }
}

}  // namespace

bool PrimeTable::contains(std::uint64_t n) const {
  if (n > limit_) throw std::out_of_range("PrimeTable::contains beyond limit");
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

OmegaStarTable::OmegaStarTable(std::uint64_t x, std::vector<Counter> counts)
    : x_(x), counts_(std::move(counts)) {
  if (counts_.size() != x_ + 1) {
    throw std::invalid_argument("OmegaStarTable: counter length mismatch");
  }
}

OmegaStarTable::Counter OmegaStarTable::at(std::uint64_t n) const {
  if (n == 0 || n > x_) throw std::out_of_range("OmegaStarTable::at");
  return counts_[n];
}

PrimeTable build_primes(std::uint64_t limit, const SieveOptions& opts) {
  if (limit < 2) throw std::invalid_argument("build_primes requires limit >= 2");
  if (limit > kMaxTableLimit) throw ResourceError("prime table limit too large");
  // pi(n) < 1.26 n / ln n for n >= 17
  const double ln = std::log(static_cast<double>(std::max<std::uint64_t>(limit, 17)));
  const auto estimate = static_cast<std::size_t>(1.26 * static_cast<double>(limit) / ln) + 16;
  check_budget(estimate * sizeof(std::uint32_t), opts, "prime table");

  const auto base = simple_sieve(isqrt(limit));
  const std::uint64_t seg = std::max<std::size_t>(opts.segment_length, 1024);
  const std::uint64_t chunks = (limit + 1 + seg - 1) / seg;
  std::vector<std::vector<std::uint32_t>> parts(chunks);
  parallel_chunks(chunks, resolve_threads(opts.threads), [&](std::size_t c) {
    const std::uint64_t lo = c * seg;
    const std::uint64_t hi = std::min(limit + 1, lo + seg);  // exclusive
    std::vector<char> composite(hi - lo, 0);
    for (std::uint64_t p : base) {
      if (p * p >= hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t m = start; m < hi; m += p) composite[m - lo] = 1;
    }
    auto& out = parts[c];
    for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n < hi; ++n) {
      if (!composite[n - lo]) out.push_back(static_cast<std::uint32_t>(n));
    }
  });
  std::vector<std::uint32_t> primes;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  primes.reserve(total);
  for (auto& p : parts) {
    primes.insert(primes.end(), p.begin(), p.end());
    std::vector<std::uint32_t>().swap(p);
  }
  return PrimeTable(limit, std::move(primes));
}

SpfTable build_spf(std::uint64_t limit, const SieveOptions& opts) {
  if (limit < 2) throw std::invalid_argument("build_spf requires limit >= 2");
  if (limit > kMaxTableLimit) throw ResourceError("spf table limit too large");
  check_budget((limit + 1) * sizeof(std::uint32_t), opts, "spf table");
  std::vector<std::uint32_t> spf(limit + 1, 0);
  const std::uint64_t root = isqrt(limit);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    spf[i] = static_cast<std::uint32_t>(i);
    if (i > root) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return SpfTable(limit, std::move(spf));
}

OmegaStarTable build_omega_star(std::uint64_t x, const SieveOptions& opts) {
  if (x == 0) throw std::invalid_argument("build_omega_star requires x >= 1");
  check_budget((x + 1) * sizeof(OmegaStarTable::Counter), opts, "omega* table");
  return build_omega_star(x, build_primes(std::max<std::uint64_t>(x + 1, 2), opts), opts);
}

OmegaStarTable build_omega_star(std::uint64_t x, const PrimeTable& primes,
                                const SieveOptions& opts) {
  if (x == 0) throw std::invalid_argument("build_omega_star requires x >= 1");
  if (primes.limit() < x + 1) {
    throw std::invalid_argument("build_omega_star needs primes up to x + 1");
  }
  check_budget((x + 1) * sizeof(OmegaStarTable::Counter), opts, "omega* table");
  using Counter = OmegaStarTable::Counter;
  std::vector<Counter> counts(x + 1, 0);
  const auto ps = primes.primes();
  const std::uint64_t seg = std::max<std::size_t>(opts.segment_length, 1024);
  const std::uint64_t chunks = (x + seg - 1) / seg;
  parallel_chunks(chunks, resolve_threads(opts.threads), [&](std::size_t c) {
    const std::uint64_t lo = 1 + c * seg;
    const std::uint64_t hi = std::min(x, lo + seg - 1);  // inclusive
    Counter* const base = counts.data();
    for (std::uint64_t p : ps) {
      const std::uint64_t d = p - 1;
      if (d > hi) break;
      for (std::uint64_t m = (lo + d - 1) / d * d; m <= hi; m += d) {
        if (base[m] == std::numeric_limits<Counter>::max()) {
          throw std::logic_error("omega* counter overflow at n = " + std::to_string(m));
        }
        ++base[m];
      }
    }
  });
  return OmegaStarTable(x, std::move(counts));
}

unsigned omega_star_single(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("omega_star_single(0)");
  unsigned count = 0;
  for (std::uint64_t d : divisors(factorize(n))) {
    if (d != std::numeric_limits<std::uint64_t>::max() && is_prime(d + 1)) ++count;
  }
  return count;
}

Factorization factorize(std::uint64_t n, const SpfTable& spf) {
  if (n == 0) throw std::invalid_argument("factorize(0)");
  if (n > spf.limit()) throw std::out_of_range("factorize: n beyond spf table");
  std::vector<PrimePower> entries;
  while (n > 1) {
    const std::uint64_t p = spf[n];
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    entries.push_back({p, e});
  }
  return Factorization(std::move(entries));
}

namespace {

constexpr std::array<char, 4> kMagic = {'O', 'M', 'S', 'T'};

template <class T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
  }
}

template <class T>
T get_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

void save_omega_star(const OmegaStarTable& table, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(16 + 2 * table.x());
  buf.append(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(buf, kOmegaStarDumpVersion);
  put_le<std::uint64_t>(buf, table.x());
  for (auto c : table.counts()) put_le<std::uint16_t>(buf, c);
  write_file_atomic(path, buf);
}

OmegaStarTable load_omega_star(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<unsigned char, 16> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size()) ||
      !std::equal(kMagic.begin(), kMagic.end(), header.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw std::runtime_error("not an OMST dump: " + path.string());
  }
  if (get_le<std::uint32_t>(header.data() + 4) != kOmegaStarDumpVersion) {
    throw std::runtime_error("unsupported OMST version");
  }
  const auto x = get_le<std::uint64_t>(header.data() + 8);
  const auto size = std::filesystem::file_size(path);
  if (x == 0 || size != 16 + 2 * x) {
    throw std::runtime_error("OMST payload length does not match header");
  }
  std::vector<OmegaStarTable::Counter> counts(x + 1, 0);
  std::vector<unsigned char> block(std::size_t{1} << 20);
  for (std::uint64_t n = 1; n <= x;) {
    const std::uint64_t take = std::min<std::uint64_t>(block.size() / 2, x - n + 1);
    in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(2 * take));
    if (in.gcount() != static_cast<std::streamsize>(2 * take)) {
      throw std::runtime_error("truncated OMST payload");
    }
    for (std::uint64_t i = 0; i < take; ++i) {
      counts[n + i] = get_le<std::uint16_t>(block.data() + 2 * i);
    }
    n += take;
  }
  return OmegaStarTable(x, std::move(counts));
}

}  // namespace omegastar
