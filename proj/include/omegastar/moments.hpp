#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "omegastar/lcm_algebra.hpp"
#include "omegastar/numeric.hpp"
#include "omegastar/sieves.hpp"
#include "omegastar/wide.hpp"

namespace omegastar {

inline constexpr std::uint64_t kDefaultWorkBudget = 1'000'000'000ULL;

/// 2^k - k - 1.
unsigned moment_log_exponent(unsigned k);

struct MomentRecord {
  std::uint64_t x = 0;
  unsigned k = 0;
  u128 sum = 0;        ///< exact sum_{n <= x} w(n)^k
  double ratio = 0.0;  ///< sum / (x (ln x)^{2^k - k - 1})
};

struct DistributionRecord {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  std::uint64_t count = 0;  ///< #{n <= x : w(n) >= y}
};

/// hist[v] = #{n <= upto : w(n) = v}.
std::vector<std::uint64_t> value_histogram(const OmegaStarTable& table, std::uint64_t upto);

/// Exact power sum; throws std::range_error if it exceeds 128 bits. 1 <= k <= 8.
MomentRecord moment_sum(const OmegaStarTable& table, unsigned k);
MomentRecord moment_sum(const OmegaStarTable& table, unsigned k, std::uint64_t upto);

/// {p - 1 <= x : p prime}, increasing.
std::vector<std::uint64_t> shifted_values(std::uint64_t x);

struct TupleOptions {
  std::uint64_t budget = kDefaultWorkBudget;  ///< DFS nodes, all branches together
  unsigned threads = 0;
};

struct TupleTotals {
  u128 count = 0;      ///< ordered tuples with lcm <= x
  u128 floor_sum = 0;  ///< sum of floor(x / lcm) over those tuples
  std::uint64_t nodes = 0;
};

/// Nondecreasing DFS over shifted values with running-lcm pruning; each
/// canonical tuple is weighted by its number of distinct orderings.
/// Throws ResourceError once the budget is exhausted.
TupleTotals enumerate_tuples(std::uint64_t x, unsigned k, const TupleOptions& opts = {});
u128 p_k_count(std::uint64_t x, unsigned k, const TupleOptions& opts = {});
u128 moment_via_tuples(std::uint64_t x, unsigned k, const TupleOptions& opts = {});

std::vector<DistributionRecord> distribution(const OmegaStarTable& table,
                                             std::span<const std::uint64_t> y_grid);

struct MarkovReport {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  bool ok() const { return violations == 0; }
};

/// N(x, y) * y^k <= S_k(x) for each k and y, in exact integers.
MarkovReport markov_check(const OmegaStarTable& table, std::span<const unsigned> ks,
                          std::span<const std::uint64_t> y_grid);

struct DyadicLevel {
  unsigned level = 0;
  std::uint64_t count = 0;  ///< #{n : e^level < w(n) <= e^{level+1}}
  double weight = 0.0;      ///< e^{j level} count
};

struct DyadicProfile {
  unsigned j = 0;
  std::vector<DyadicLevel> levels;
  unsigned argmax_level = 0;  ///< level with the largest weight
  long double cap_sum = 0;    ///< sum e^{(level+1) j} count
  long double power_sum = 0;  ///< sum_{w(n) > 1} w(n)^j
  /// Per level, count e^{(level+1) j} >= sum of w^j inside the level; decided
  /// in rationals against a lower bound for e, so summing gives the total.
  bool cap_inequality = false;
};

/// The level of an integer v >= 2: e^level < v <= e^{level+1}.
unsigned dyadic_level(std::uint64_t v);

DyadicProfile dyadic_profile(const OmegaStarTable& table, unsigned j);

struct Interval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

/// Prime tuples with p_i in box i and gcd(p_i - 1, p_j - 1) = m_ij for all pairs.
std::uint64_t count_profile_tuples(std::span<const Interval> boxes, const PairProfile& m,
                                   const TupleOptions& opts = {});

/// S_k at every grid point from a single table built at the largest x.
std::vector<MomentRecord> ratio_table(std::span<const unsigned> ks,
                                      std::span<const std::uint64_t> x_grid,
                                      const SieveOptions& opts = {});
std::vector<MomentRecord> ratio_table(const OmegaStarTable& table, std::span<const unsigned> ks,
                                      std::span<const std::uint64_t> x_grid);

/// Slope of ln(S_k(x)/x) against ln ln x over the records with the given k.
LinearFit exponent_fit(unsigned k, std::span<const MomentRecord> records);

/// S_1(x)/x - ln ln x.
double first_moment_excess(const MomentRecord& r);

/// a, a*factor, a*factor^2, ... up to b.
std::vector<std::uint64_t> geometric_grid(std::uint64_t a, std::uint64_t b, std::uint64_t factor);

}  // namespace omegastar
