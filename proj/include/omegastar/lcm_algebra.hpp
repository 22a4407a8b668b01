#pragma once

// Subset-indexed gcd/lcm identities over tuples (t_1, ..., t_k), the coprime
// u_S decomposition, pairwise gcd profiles, and the products used when
// counting tuples prime by prime.
//
// Elements of [k] are labelled 1..k throughout; element i is bit i - 1 of a
// SubsetKey mask.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "omegastar/wide.hpp"

namespace omegastar {

inline constexpr unsigned kMaxTupleLength = 16;

class SubsetKey {
 public:
  constexpr SubsetKey() = default;
  explicit constexpr SubsetKey(std::uint32_t mask) : mask_(mask) {}

  static SubsetKey of(std::initializer_list<unsigned> elements);
  static constexpr SubsetKey full(unsigned k) { return SubsetKey((1u << k) - 1); }
  static constexpr SubsetKey singleton(unsigned i) { return SubsetKey(1u << (i - 1)); }
  static constexpr SubsetKey pair(unsigned i, unsigned j) {
    return SubsetKey((1u << (i - 1)) | (1u << (j - 1)));
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr unsigned size() const { return static_cast<unsigned>(__builtin_popcount(mask_)); }
  constexpr bool contains(unsigned i) const { return (mask_ >> (i - 1)) & 1u; }
  /// Smallest element; undefined for the empty key.
  constexpr unsigned min_element() const { return static_cast<unsigned>(__builtin_ctz(mask_)) + 1; }
  constexpr bool includes(SubsetKey other) const { return (mask_ & other.mask_) == other.mask_; }
  constexpr SubsetKey operator|(SubsetKey o) const { return SubsetKey(mask_ | o.mask_); }
  constexpr auto operator<=>(const SubsetKey&) const = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Every nonempty subset of [k], by descending size then ascending mask.
std::vector<SubsetKey> subsets_descending(unsigned k);

/// Total map from nonempty subsets of [k] to positive integers.
class SubsetFamily {
 public:
  SubsetFamily() = default;
  explicit SubsetFamily(unsigned k, std::uint64_t fill = 1);

  unsigned k() const { return k_; }
  std::uint64_t operator[](SubsetKey s) const { return values_[s.mask()]; }
  std::uint64_t& operator[](SubsetKey s) { return values_[s.mask()]; }
  bool operator==(const SubsetFamily&) const = default;

 private:
  unsigned k_ = 0;
  std::vector<std::uint64_t> values_;  // index 0 unused
};

/// Raised when an identity that should hold exactly fails on a concrete tuple.
class CounterexampleError : public std::runtime_error {
 public:
  CounterexampleError(const std::string& what, std::vector<std::uint64_t> tuple,
                      SubsetKey subset = {})
      : std::runtime_error(what), tuple_(std::move(tuple)), subset_(subset) {}
  const std::vector<std::uint64_t>& tuple() const { return tuple_; }
  SubsetKey subset() const { return subset_; }

 private:
  std::vector<std::uint64_t> tuple_;
  SubsetKey subset_;
};

/// t_S = gcd{t_i : i in S}.
SubsetFamily subset_gcds(std::span<const std::uint64_t> t);

struct LcmIdentityResult {
  mpz_class lhs;  ///< lcm(t_1, ..., t_k)
  mpq_class rhs;  ///< prod_{|B| odd} t_B / prod_{|C| even} t_C
  bool equal = false;
};

/// Evaluates both sides prime by prime from the factorizations of the t_i.
LcmIdentityResult lcm_identity_check(std::span<const std::uint64_t> t);

/// Same identity in 128-bit integers; nullopt when a product overflows.
std::optional<bool> lcm_identity_check_widened(std::span<const std::uint64_t> t);

struct USDecomposition {
  unsigned k = 0;
  SubsetFamily u;       ///< u_S
  SubsetFamily source;  ///< t_S
};

struct USInvariants {
  bool reconstruction = false;  ///< t_S = prod_{T >= S} u_T
  bool product_is_lcm = false;  ///< prod_S u_S = lcm(t)
  bool coprimality = false;     ///< gcd(U(S1), U(S2)) = U(S1 | S2)
  bool all() const { return reconstruction && product_is_lcm && coprimality; }
};

/// u_[k] = t_[k], then u_S = t_S / prod_{T strictly above S} u_T by
/// descending |S|. Throws CounterexampleError if a quotient is not integral
/// or any invariant fails.
USDecomposition us_decompose(std::span<const std::uint64_t> t);

/// The three invariants checked independently of the recursion.
USInvariants check_us_invariants(const USDecomposition& dec, std::span<const std::uint64_t> t);

/// Prescribed pairwise gcds m_{ij}, 1 <= i < j <= k.
class PairProfile {
 public:
  PairProfile() = default;
  /// Values in lexicographic pair order (1,2), (1,3), ..., (k-1,k).
  PairProfile(unsigned k, std::vector<std::uint64_t> values);
  explicit PairProfile(unsigned k, std::uint64_t fill = 1);

  static std::size_t pair_count(unsigned k) { return std::size_t{k} * (k - 1) / 2; }
  static std::size_t index(unsigned k, unsigned i, unsigned j);

  unsigned k() const { return k_; }
  const std::vector<std::uint64_t>& values() const { return m_; }
  std::uint64_t at(unsigned i, unsigned j) const { return m_[index(k_, i, j)]; }
  std::uint64_t at(SubsetKey pair) const;
  void set(unsigned i, unsigned j, std::uint64_t v) { m_[index(k_, i, j)] = v; }
  /// m_S = gcd{m_ij : i, j in S} for |S| >= 2.
  std::uint64_t subset_value(SubsetKey s) const;

  bool operator==(const PairProfile&) const = default;

 private:
  unsigned k_ = 0;
  std::vector<std::uint64_t> m_;
};

/// gcd(m_A1, m_B1) = gcd(m_A2, m_B2) whenever A1 | B1 = A2 | B2.
bool profile_consistent(const PairProfile& m);
/// m_ij = gcd(t_i, t_j).
PairProfile profile_from_tuple(std::span<const std::uint64_t> t);
/// M_i = lcm{m_A : A contains i}.
u128 big_m(const PairProfile& m, unsigned i);
/// gcd(M_i, M_j) = m_ij for every pair.
bool gcd_check_M(const PairProfile& m);

/// Alternating product of m_S^{|S|-1} (even |S| upstairs, odd |S| >= 3
/// downstairs), evaluated prime by prime.
mpq_class d_formula(const PairProfile& m);
/// lcm{m_A : |A| = 2}.
mpz_class d_lcm(const PairProfile& m);

struct ProfileCensus {
  unsigned k = 0;
  std::uint64_t p = 0;
  unsigned max_exp = 0;
  std::uint64_t enumerated = 0;
  std::uint64_t consistent = 0;
  std::uint64_t d_equals_p = 0;
  /// d_formula = d_lcm, gcd_check_M and tuple realization on every consistent profile.
  bool all_ok = true;
  std::optional<PairProfile> first_failure;
};

/// Exhausts every profile with m_A = p^e, 0 <= e <= max_exp. 2 <= k <= 6.
ProfileCensus count_profiles_at_prime(unsigned k, std::uint64_t p, unsigned max_exp,
                                      unsigned threads = 0);

/// (min(a_i, a_j) : i < j) for a 0/1 vector.
std::vector<std::uint8_t> psi_map(std::span<const std::uint8_t> alpha);

struct PsiReport {
  unsigned k = 0;
  std::uint64_t domain_size = 0;  ///< 0/1 vectors with at least two ones
  std::uint64_t image_size = 0;
  bool injective = false;
};

PsiReport psi_injectivity(unsigned k);

/// prod over primes p dividing prod m_A of (1 - 1/p)^{k-1}.
mpq_class b_of_profile(const PairProfile& m);
/// Sum of b over consistent profiles with D(m) = p (exhaustive, k <= 6).
mpq_class g_k_at_prime(unsigned k, std::uint64_t p);
/// Multiplicative extension: mu^2(m) prod_{p | m} g_k(p).
mpq_class g_k(unsigned k, std::uint64_t m);
/// Direct sum over profiles with entries dividing m and lcm = m; small m only.
mpq_class g_k_direct(unsigned k, std::uint64_t m);

/// Products used to bound the tuples whose largest u_S is u_{T0},
/// T0 = {nu+1, ..., k}.
struct SkeletonProducts {
  unsigned k = 0;
  unsigned nu = 0;
  SubsetKey t0;
  std::vector<mpz_class> v;  ///< V_0 .. V_nu, V_0 = 1
  mpz_class g;               ///< prod_{min S <= nu} u_S
  std::vector<mpz_class> a;  ///< a_{nu+1} .. a_k
  mpz_class delta;
  mpz_class delta_prime;
  bool a_coprime_ok = false;
  bool delta_nonzero = false;
  bool delta_prime_nonzero = false;
  /// G = prod_{i <= nu} t_i / V_{i-1}.
  bool g_chain_ok = false;
};

SkeletonProducts skeleton_products(const USDecomposition& dec, unsigned nu);
/// Rejects t0 other than {nu+1, ..., k}.
SkeletonProducts skeleton_products(const USDecomposition& dec, unsigned nu, SubsetKey t0);

}  // namespace omegastar
