#include "omegastar/lcm_algebra.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "omegastar/arith.hpp"
#include "omegastar/exact.hpp"
#include "omegastar/parallel.hpp"

namespace omegastar {

namespace {

void check_tuple_length(std::size_t k) {
  if (k < 2 || k > kMaxTupleLength) {
    throw std::invalid_argument("tuple length must be in [2, 16], got " + std::to_string(k));
  }
}

void check_positive(std::span<const std::uint64_t> t) {
  for (auto v : t) {
    if (v == 0) throw std::invalid_argument("tuple entries must be positive");
  }
}

// Sorted union of the primes dividing any of the values.
std::vector<std::uint64_t> prime_support(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> primes;
  for (auto v : values) {
    if (v < 2) continue;
    for (const auto& pp : factorize(v)) primes.push_back(pp.prime);
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  return primes;
}

mpq_class from_exponents(std::span<const std::uint64_t> primes, std::span<const long> exps) {
  mpz_class num = 1, den = 1;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (exps[i] > 0) num *= pow_mpz(primes[i], static_cast<unsigned long>(exps[i]));
    if (exps[i] < 0) den *= pow_mpz(primes[i], static_cast<unsigned long>(-exps[i]));
  }
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

// All proper supersets of s inside [k], as masks.
template <class Fn>
void for_each_strict_superset(std::uint32_t s, unsigned k, Fn&& fn) {
  const std::uint32_t rest = ((1u << k) - 1) & ~s;
  for (std::uint32_t sub = rest; sub != 0; sub = (sub - 1) & rest) fn(s | sub);
}

}  // namespace

SubsetKey SubsetKey::of(std::initializer_list<unsigned> elements) {
  std::uint32_t mask = 0;
  for (unsigned e : elements) {
    if (e == 0 || e > kMaxTupleLength) throw std::invalid_argument("subset element out of range");
    mask |= 1u << (e - 1);
  }
  return SubsetKey(mask);
}

std::vector<SubsetKey> subsets_descending(unsigned k) {
  std::vector<SubsetKey> out;
  out.reserve((std::size_t{1} << k) - 1);
  for (std::uint32_t m = 1; m < (1u << k); ++m) out.emplace_back(m);
  std::stable_sort(out.begin(), out.end(), [](SubsetKey a, SubsetKey b) {
    return a.size() > b.size();
  });
  return out;
}

SubsetFamily::SubsetFamily(unsigned k, std::uint64_t fill)
    : k_(k), values_(std::size_t{1} << k, fill) {
  values_[0] = 0;
}

SubsetFamily subset_gcds(std::span<const std::uint64_t> t) {
  check_tuple_length(t.size());
  check_positive(t);
  const auto k = static_cast<unsigned>(t.size());
  SubsetFamily fam(k);
  for (std::uint32_t m = 1; m < (1u << k); ++m) {
    const std::uint32_t low = m & (~m + 1);
    const std::uint32_t rest = m ^ low;
    const std::uint64_t tl = t[static_cast<std::size_t>(__builtin_ctz(low))];
    fam[SubsetKey(m)] = rest == 0 ? tl : gcd(fam[SubsetKey(rest)], tl);
  }
  return fam;
}

LcmIdentityResult lcm_identity_check(std::span<const std::uint64_t> t) {
  check_tuple_length(t.size());
  check_positive(t);
  const auto k = static_cast<unsigned>(t.size());
  const SubsetFamily tS = subset_gcds(t);
  const auto primes = prime_support(t);

  std::vector<long> lhs_exp(primes.size(), 0), rhs_exp(primes.size(), 0);
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (auto v : t) lhs_exp[i] = std::max<long>(lhs_exp[i], valuation(v, primes[i]));
  }
  mpz_class num = 1, den = 1;
  for (std::uint32_t m = 1; m < (1u << k); ++m) {
    const SubsetKey s(m);
    const std::uint64_t v = tS[s];
    const bool odd = (s.size() % 2) == 1;
    (odd ? num : den) *= to_mpz(v);
    if (v == 1) continue;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      const long e = valuation(v, primes[i]);
      rhs_exp[i] += odd ? e : -e;
    }
  }
  LcmIdentityResult r;
  r.lhs = from_exponents(primes, lhs_exp).get_num();
  r.rhs = mpq_class(num, den);
  r.rhs.canonicalize();
  r.equal = lhs_exp == rhs_exp && r.rhs == mpq_class(r.lhs);
  return r;
}

std::optional<bool> lcm_identity_check_widened(std::span<const std::uint64_t> t) {
  check_tuple_length(t.size());
  check_positive(t);
  const auto k = static_cast<unsigned>(t.size());
  const SubsetFamily tS = subset_gcds(t);
  try {
    u128 num = 1, den = 1;
    for (std::uint32_t m = 1; m < (1u << k); ++m) {
      const SubsetKey s(m);
      if (s.size() % 2 == 1) {
        num = checked_mul(num, tS[s]);
      } else {
        den = checked_mul(den, tS[s]);
      }
    }
    const u128 l = lcm_of(t);
    return checked_mul(l, den) == num;
  } catch (const std::range_error&) {
    return std::nullopt;
  }
}

USInvariants check_us_invariants(const USDecomposition& dec, std::span<const std::uint64_t> t) {
  const unsigned k = dec.k;
  const std::uint32_t full = (1u << k) - 1;
  USInvariants inv;

  // up[S] = prod_{T >= S} u_T by a superset product transform.
  std::vector<u128> up(std::size_t{1} << k, 1);
  bool up_ok = true;
  try {
    for (std::uint32_t m = 1; m <= full; ++m) up[m] = dec.u[SubsetKey(m)];
    for (unsigned b = 0; b < k; ++b) {
      for (std::uint32_t m = 1; m <= full; ++m) {
        if (!(m & (1u << b))) up[m] = checked_mul(up[m], up[m | (1u << b)]);
      }
    }
  } catch (const std::range_error&) {
    up_ok = false;
  }

  inv.reconstruction = up_ok;
  for (std::uint32_t m = 1; up_ok && m <= full; ++m) {
    if (up[m] != dec.source[SubsetKey(m)]) inv.reconstruction = false;
  }
  for (unsigned i = 0; up_ok && i < k; ++i) {
    if (up[1u << i] != t[i]) inv.reconstruction = false;
  }

  // Product against the lcm, one prime at a time.
  const auto primes = prime_support(t);
  std::vector<long> want(primes.size(), 0), got(primes.size(), 0);
  bool stray_factor = false;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (auto v : t) want[i] = std::max<long>(want[i], valuation(v, primes[i]));
  }
  for (std::uint32_t m = 1; m <= full; ++m) {
    std::uint64_t v = dec.u[SubsetKey(m)];
    if (v == 0) {
      stray_factor = true;
      continue;
    }
    for (std::size_t i = 0; i < primes.size() && v > 1; ++i) {
      while (v % primes[i] == 0) {
        v /= primes[i];
        ++got[i];
      }
    }
    if (v != 1) stray_factor = true;
  }
  inv.product_is_lcm = !stray_factor && want == got;

  inv.coprimality = up_ok;
  for (std::uint32_t s1 = 1; up_ok && s1 <= full && inv.coprimality; ++s1) {
    for (std::uint32_t s2 = s1; s2 <= full; ++s2) {
      if (gcd(up[s1], up[s2]) != up[s1 | s2]) {
        inv.coprimality = false;
        break;
      }
    }
  }
  return inv;
}

USDecomposition us_decompose(std::span<const std::uint64_t> t) {
  check_tuple_length(t.size());
  check_positive(t);
  const auto k = static_cast<unsigned>(t.size());
  std::vector<std::uint64_t> tuple(t.begin(), t.end());
  USDecomposition dec{k, SubsetFamily(k), subset_gcds(t)};
  for (SubsetKey s : subsets_descending(k)) {
    u128 above = 1;
    try {
      for_each_strict_superset(s.mask(), k, [&](std::uint32_t sup) {
        above = checked_mul(above, dec.u[SubsetKey(sup)]);
      });
    } catch (const std::range_error&) {
      throw CounterexampleError("u_S recursion: superset product overflow", tuple, s);
    }
    const std::uint64_t ts = dec.source[s];
    if (above == 0 || ts % above != 0) {
      throw CounterexampleError("u_S recursion: non-integral quotient", tuple, s);
    }
    dec.u[s] = static_cast<std::uint64_t>(ts / above);
  }
  const USInvariants inv = check_us_invariants(dec, t);
  if (!inv.reconstruction) throw CounterexampleError("u_S reconstruction failed", tuple);
  if (!inv.product_is_lcm) throw CounterexampleError("prod u_S != lcm", tuple);
  if (!inv.coprimality) throw CounterexampleError("u_S coprimality failed", tuple);
  return dec;
}

PairProfile::PairProfile(unsigned k, std::vector<std::uint64_t> values)
    : k_(k), m_(std::move(values)) {
  check_tuple_length(k);
  if (m_.size() != pair_count(k)) throw std::invalid_argument("PairProfile: wrong number of values");
  for (auto v : m_) {
    if (v == 0) throw std::invalid_argument("PairProfile values must be positive");
  }
}

PairProfile::PairProfile(unsigned k, std::uint64_t fill)
    : PairProfile(k, std::vector<std::uint64_t>(pair_count(k), fill)) {}

std::size_t PairProfile::index(unsigned k, unsigned i, unsigned j) {
  if (i > j) std::swap(i, j);
  if (i == 0 || i == j || j > k) throw std::out_of_range("PairProfile: bad pair");
  return std::size_t{i - 1} * (2 * k - i) / 2 + (j - i - 1);
}

std::uint64_t PairProfile::at(SubsetKey pair) const {
  if (pair.size() != 2) throw std::invalid_argument("PairProfile::at needs a 2-element key");
  const unsigned i = pair.min_element();
  const unsigned j = SubsetKey(pair.mask() & ~(1u << (i - 1))).min_element();
  return at(i, j);
}

std::uint64_t PairProfile::subset_value(SubsetKey s) const {
  if (s.size() < 2) throw std::invalid_argument("m_S needs |S| >= 2");
  std::uint64_t g = 0;
  for (unsigned i = 1; i <= k_; ++i) {
    if (!s.contains(i)) continue;
    for (unsigned j = i + 1; j <= k_; ++j) {
      if (s.contains(j)) g = gcd(g, at(i, j));
    }
  }
  return g;
}

namespace {

std::vector<SubsetKey> pair_keys(unsigned k) {
  std::vector<SubsetKey> out;
  for (unsigned i = 1; i <= k; ++i) {
    for (unsigned j = i + 1; j <= k; ++j) out.push_back(SubsetKey::pair(i, j));
  }
  return out;
}

// m_S for every mask with |S| >= 2 (0 elsewhere).
std::vector<std::uint64_t> all_subset_values(const PairProfile& m) {
  const unsigned k = m.k();
  std::vector<std::uint64_t> ms(std::size_t{1} << k, 0);
  for (std::uint32_t s = 1; s < (1u << k); ++s) {
    const unsigned size = static_cast<unsigned>(__builtin_popcount(s));
    if (size < 2) continue;
    if (size == 2) {
      ms[s] = m.at(SubsetKey(s));
      continue;
    }
    // Any pair inside S misses at least one of three chosen elements.
    std::uint32_t rest = s;
    std::uint64_t g = 0;
    for (int c = 0; c < 3; ++c) {
      const std::uint32_t bit = rest & (~rest + 1);
      rest ^= bit;
      g = gcd(g, ms[s ^ bit]);
    }
    ms[s] = g;
  }
  return ms;
}

}  // namespace

bool profile_consistent(const PairProfile& m) {
  const unsigned k = m.k();
  if (k < 3) return true;
  const auto keys = pair_keys(k);
  std::vector<std::uint64_t> seen(std::size_t{1} << k, 0);
  for (std::size_t a = 0; a < keys.size(); ++a) {
    for (std::size_t b = a + 1; b < keys.size(); ++b) {
      const std::uint32_t u = keys[a].mask() | keys[b].mask();
      const std::uint64_t g = gcd(m.values()[a], m.values()[b]);
      if (seen[u] == 0) {
        seen[u] = g;
      } else if (seen[u] != g) {
        return false;
      }
    }
  }
  return true;
}

PairProfile profile_from_tuple(std::span<const std::uint64_t> t) {
  check_tuple_length(t.size());
  check_positive(t);
  const auto k = static_cast<unsigned>(t.size());
  PairProfile m(k);
  for (unsigned i = 1; i <= k; ++i) {
    for (unsigned j = i + 1; j <= k; ++j) m.set(i, j, gcd(t[i - 1], t[j - 1]));
  }
  return m;
}

u128 big_m(const PairProfile& m, unsigned i) {
  if (i == 0 || i > m.k()) throw std::out_of_range("big_m index");
  u128 acc = 1;
  for (unsigned j = 1; j <= m.k(); ++j) {
    if (j != i) acc = lcm(acc, m.at(i, j));
  }
  return acc;
}

bool gcd_check_M(const PairProfile& m) {
  std::vector<u128> M(m.k() + 1);
  for (unsigned i = 1; i <= m.k(); ++i) M[i] = big_m(m, i);
  for (unsigned i = 1; i <= m.k(); ++i) {
    for (unsigned j = i + 1; j <= m.k(); ++j) {
      if (gcd(M[i], M[j]) != m.at(i, j)) return false;
    }
  }
  return true;
}

mpq_class d_formula(const PairProfile& m) {
  const auto primes = prime_support(m.values());
  const auto ms = all_subset_values(m);
  std::vector<long> exps(primes.size(), 0);
  for (std::uint32_t s = 1; s < ms.size(); ++s) {
    const long size = __builtin_popcount(s);
    if (size < 2 || ms[s] == 1) continue;
    const long sign = (size % 2 == 0) ? 1 : -1;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      exps[i] += sign * (size - 1) * static_cast<long>(valuation(ms[s], primes[i]));
    }
  }
  return from_exponents(primes, exps);
}

mpz_class d_lcm(const PairProfile& m) {
  mpz_class acc = 1;
  for (auto v : m.values()) mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), to_mpz(v).get_mpz_t());
  return acc;
}

namespace {

// Pair-index pairs grouped by the union of the two pairs.
std::vector<std::vector<std::pair<unsigned, unsigned>>> union_groups(unsigned k) {
  const auto keys = pair_keys(k);
  std::map<std::uint32_t, std::vector<std::pair<unsigned, unsigned>>> by_union;
  for (unsigned a = 0; a < keys.size(); ++a) {
    for (unsigned b = a + 1; b < keys.size(); ++b) {
      by_union[keys[a].mask() | keys[b].mask()].emplace_back(a, b);
    }
  }
  std::vector<std::vector<std::pair<unsigned, unsigned>>> out;
  for (auto& [u, g] : by_union) {
    if (g.size() > 1) out.push_back(std::move(g));
  }
  return out;
}

bool exponents_consistent(const std::vector<std::uint8_t>& e,
                          const std::vector<std::vector<std::pair<unsigned, unsigned>>>& groups) {
  for (const auto& g : groups) {
    const auto first = std::min(e[g[0].first], e[g[0].second]);
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (std::min(e[g[i].first], e[g[i].second]) != first) return false;
    }
  }
  return true;
}

bool census_profile_ok(const PairProfile& prof) {
  if (!profile_consistent(prof)) return false;
  if (d_formula(prof) != mpq_class(d_lcm(prof))) return false;
  if (!gcd_check_M(prof)) return false;
  std::vector<std::uint64_t> witness(prof.k());
  for (unsigned i = 1; i <= prof.k(); ++i) witness[i - 1] = narrow_u64(big_m(prof, i));
  return profile_from_tuple(witness) == prof;
}

}  // namespace

ProfileCensus count_profiles_at_prime(unsigned k, std::uint64_t p, unsigned max_exp,
                                      unsigned threads) {
  if (k < 2 || k > 6) throw std::invalid_argument("count_profiles_at_prime: k must be in [2, 6]");
  if (max_exp < 1) throw std::invalid_argument("count_profiles_at_prime: max_exp must be >= 1");
  if (!is_prime(p)) throw std::invalid_argument("count_profiles_at_prime: p must be prime");
  std::vector<std::uint64_t> powers{1};
  for (unsigned e = 1; e <= max_exp; ++e) powers.push_back(narrow_u64(checked_mul(powers.back(), p)));

  const std::size_t pairs = PairProfile::pair_count(k);
  const std::uint64_t base = max_exp + 1;
  const std::uint64_t total = narrow_u64(checked_pow(base, static_cast<unsigned>(pairs)));
  if (total > 4'000'000'000ULL) throw ResourceError("profile census too large");
  const auto groups = union_groups(k);

  struct Partial {
    std::uint64_t consistent = 0, d_equals_p = 0;
    std::uint64_t first_bad = ~std::uint64_t{0};
  };
  constexpr std::uint64_t kChunk = 1 << 16;
  const std::size_t chunks = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
  std::vector<Partial> parts(chunks);
  parallel_chunks(chunks, resolve_threads(threads), [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    std::vector<std::uint8_t> e(pairs);
    std::uint64_t rem = begin;
    for (std::size_t i = 0; i < pairs; ++i) {
      e[i] = static_cast<std::uint8_t>(rem % base);
      rem /= base;
    }
    Partial& out = parts[c];
    std::vector<std::uint64_t> vals(pairs);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      if (exponents_consistent(e, groups)) {
        ++out.consistent;
        for (std::size_t i = 0; i < pairs; ++i) vals[i] = powers[e[i]];
        const PairProfile prof(k, vals);
        if (!census_profile_ok(prof)) out.first_bad = std::min(out.first_bad, idx);
        if (d_lcm(prof) == to_mpz(p)) ++out.d_equals_p;
      }
      for (std::size_t i = 0; i < pairs; ++i) {
        if (++e[i] < base) break;
        e[i] = 0;
      }
    }
  });

  ProfileCensus census;
  census.k = k;
  census.p = p;
  census.max_exp = max_exp;
  census.enumerated = total;
  std::uint64_t first_bad = ~std::uint64_t{0};
  for (const auto& part : parts) {
    census.consistent += part.consistent;
    census.d_equals_p += part.d_equals_p;
    first_bad = std::min(first_bad, part.first_bad);
  }
  if (first_bad != ~std::uint64_t{0}) {
    census.all_ok = false;
    std::vector<std::uint64_t> vals(pairs);
    std::uint64_t rem = first_bad;
    for (std::size_t i = 0; i < pairs; ++i) {
      vals[i] = powers[rem % base];
      rem /= base;
    }
    census.first_failure = PairProfile(k, vals);
  }
  return census;
}

std::vector<std::uint8_t> psi_map(std::span<const std::uint8_t> alpha) {
  const std::size_t k = alpha.size();
  std::vector<std::uint8_t> out;
  out.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) out.push_back(std::min(alpha[i], alpha[j]));
  }
  return out;
}

PsiReport psi_injectivity(unsigned k) {
  if (k < 2 || k > 20) throw std::invalid_argument("psi_injectivity: k must be in [2, 20]");
  PsiReport r;
  r.k = k;
  std::set<std::vector<std::uint8_t>> images;
  std::vector<std::uint8_t> alpha(k);
  for (std::uint32_t bits = 0; bits < (1u << k); ++bits) {
    if (__builtin_popcount(bits) < 2) continue;
    for (unsigned i = 0; i < k; ++i) alpha[i] = (bits >> i) & 1u;
    ++r.domain_size;
    images.insert(psi_map(alpha));
  }
  r.image_size = images.size();
  r.injective = r.image_size == r.domain_size;
  return r;
}

mpq_class b_of_profile(const PairProfile& m) {
  mpq_class b = 1;
  for (auto p : prime_support(m.values())) {
    mpq_class factor(to_mpz(p - 1), to_mpz(p));
    factor.canonicalize();
    for (unsigned i = 1; i < m.k(); ++i) b *= factor;
  }
  return b;
}

mpq_class g_k_at_prime(unsigned k, std::uint64_t p) {
  if (k < 2 || k > 6) throw std::invalid_argument("g_k_at_prime: k must be in [2, 6]");
  if (!is_prime(p)) throw std::invalid_argument("g_k_at_prime: p must be prime");
  // D(m) = lcm = p forces every entry into {1, p}.
  const std::size_t pairs = PairProfile::pair_count(k);
  const mpq_class target(to_mpz(p));
  mpq_class sum = 0;
  std::vector<std::uint64_t> vals(pairs);
  for (std::uint32_t bits = 0; bits < (1u << pairs); ++bits) {
    for (std::size_t i = 0; i < pairs; ++i) vals[i] = ((bits >> i) & 1u) ? p : 1;
    const PairProfile prof(k, vals);
    if (profile_consistent(prof) && d_formula(prof) == target) sum += b_of_profile(prof);
  }
  return sum;
}

mpq_class g_k(unsigned k, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("g_k(0)");
  const auto f = factorize(m);
  if (mobius(f) == 0) return 0;
  mpq_class r = 1;
  for (const auto& pp : f) r *= g_k_at_prime(k, pp.prime);
  return r;
}

mpq_class g_k_direct(unsigned k, std::uint64_t m) {
  check_tuple_length(k);
  if (m == 0) throw std::invalid_argument("g_k_direct(0)");
  const auto f = factorize(m);
  if (mobius(f) == 0) return 0;
  const auto divs = divisors(f);
  const std::size_t pairs = PairProfile::pair_count(k);
  u128 total = 1;
  try {
    total = checked_pow(divs.size(), static_cast<unsigned>(pairs));
  } catch (const std::range_error&) {
    throw ResourceError("g_k_direct: enumeration too large");
  }
  if (total > 50'000'000) throw ResourceError("g_k_direct: enumeration too large");
  const mpq_class target(to_mpz(m));
  mpq_class sum = 0;
  std::vector<std::size_t> digit(pairs, 0);
  std::vector<std::uint64_t> vals(pairs, 1);
  for (u128 idx = 0; idx < total; ++idx) {
    for (std::size_t i = 0; i < pairs; ++i) vals[i] = divs[digit[i]];
    const PairProfile prof(k, vals);
    if (profile_consistent(prof) && d_formula(prof) == target) sum += b_of_profile(prof);
    for (std::size_t i = 0; i < pairs; ++i) {
      if (++digit[i] < divs.size()) break;
      digit[i] = 0;
    }
  }
  return sum;
}

SkeletonProducts skeleton_products(const USDecomposition& dec, unsigned nu) {
  const unsigned k = dec.k;
  if (nu >= k) throw std::invalid_argument("skeleton_products: nu must be < k");
  const std::uint32_t full = (1u << k) - 1;
  const std::uint32_t t0 = full & ~((1u << nu) - 1);
  auto u = [&](std::uint32_t s) { return to_mpz(dec.u[SubsetKey(s)]); };

  SkeletonProducts r;
  r.k = k;
  r.nu = nu;
  r.t0 = SubsetKey(t0);
  r.v.assign(nu + 1, mpz_class(1));
  for (unsigned i = 1; i <= nu; ++i) {
    for (std::uint32_t s = 1; s <= full; ++s) {
      const SubsetKey key(s);
      if (key.contains(i + 1) && key.min_element() <= i) r.v[i] *= u(s);
    }
  }
  r.g = 1;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (SubsetKey(s).min_element() <= nu) r.g *= u(s);
  }
  for (unsigned j = nu + 1; j <= k; ++j) {
    mpz_class aj = 1;
    for (std::uint32_t s = 1; s <= full; ++s) {
      if (SubsetKey(s).contains(j) && s != t0) aj *= u(s);
    }
    r.a.push_back(aj);
  }

  r.delta = 1;
  for (const auto& aj : r.a) r.delta *= aj;
  for (std::size_t i = 0; i < r.a.size(); ++i) {
    for (std::size_t j = i + 1; j < r.a.size(); ++j) r.delta *= abs(r.a[i] - r.a[j]);
  }

  r.delta_prime = 1;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (SubsetKey(s).min_element() > nu && s != t0) r.delta_prime *= u(s);
  }
  r.a_coprime_ok = true;
  for (unsigned i = nu + 1; i <= k; ++i) {
    for (unsigned j = i + 1; j <= k; ++j) {
      mpz_class only_i = 1, only_j = 1;
      for (std::uint32_t s = 1; s <= full; ++s) {
        const SubsetKey key(s);
        if (key.contains(i) && !key.contains(j)) only_i *= u(s);
        if (key.contains(j) && !key.contains(i)) only_j *= u(s);
      }
      if (gcd(only_i, only_j) != 1) r.a_coprime_ok = false;
      r.delta_prime *= only_i - only_j;
    }
  }
  r.delta_nonzero = r.delta != 0;
  r.delta_prime_nonzero = r.delta_prime != 0;

  mpz_class chain = 1;
  r.g_chain_ok = true;
  for (unsigned i = 1; i <= nu; ++i) {
    const mpz_class ti = to_mpz(dec.source[SubsetKey::singleton(i)]);
    if (ti % r.v[i - 1] != 0) r.g_chain_ok = false;
    chain *= ti / r.v[i - 1];
  }
  r.g_chain_ok = r.g_chain_ok && chain == r.g;
  return r;
}

SkeletonProducts skeleton_products(const USDecomposition& dec, unsigned nu, SubsetKey t0) {
  if (nu >= dec.k) throw std::invalid_argument("skeleton_products: nu must be < k");
  const std::uint32_t expected = ((1u << dec.k) - 1) & ~((1u << nu) - 1);
  if (t0.mask() != expected) throw std::invalid_argument("skeleton_products: T0 must be {nu+1..k}");
  return skeleton_products(dec, nu);
}

}  // namespace omegastar
