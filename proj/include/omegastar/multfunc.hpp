#pragma once

// Nonnegative multiplicative functions given by a rule on prime powers, and
// their logarithmic averages sum_{n <= x} f(n)/n, over all integers and over
// shifted primes.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "omegastar/numeric.hpp"
#include "json.hpp"

namespace omegastar {

class MultFuncSpec {
 public:
  enum class Rule { Unit, TauL, PhiRatioPower, Squarefree, Product, Custom };
  using CustomTable = std::map<std::pair<std::uint64_t, unsigned>, double>;

  static MultFuncSpec unit();
  /// f(p^e) = C(e + l - 1, l - 1).
  static MultFuncSpec tau_l(unsigned l);
  /// f(n) = (n / phi(n))^s.
  static MultFuncSpec phi_ratio_power(int s);
  static MultFuncSpec squarefree();
  static MultFuncSpec product(std::vector<MultFuncSpec> factors);
  /// Values at listed (p, e); other prime powers take `fallback`, or are a
  /// domain error when no fallback is given.
  static MultFuncSpec custom(CustomTable values, std::optional<double> fallback);

  /// {"rule":"tau_l","l":4} | {"rule":"phi_ratio_power","s":2} | {"rule":"unit"} |
  /// {"rule":"squarefree"} | {"rule":"product","factors":[...]} |
  /// {"rule":"custom","values":[[p,e,v],...],"default":0}
  static MultFuncSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Rule rule() const { return rule_; }

  double at_prime_power(std::uint64_t p, unsigned e) const;
  mpq_class at_prime_power_exact(std::uint64_t p, unsigned e) const;

 private:
  Rule rule_ = Rule::Unit;
  long param_ = 0;
  std::vector<MultFuncSpec> factors_;
  CustomTable table_;
  std::optional<double> fallback_;
};

double eval(const MultFuncSpec& spec, std::uint64_t n);
mpq_class eval_exact(const MultFuncSpec& spec, std::uint64_t n);

struct AveragePoint {
  std::uint64_t x = 0;
  double sum = 0.0;  ///< sum_{n <= x} f(n)/n
};

struct AverageSeries {
  std::vector<AveragePoint> points;
};

struct AverageOptions {
  std::size_t segment_length = std::size_t{1} << 18;
  unsigned threads = 0;
};

/// Segmented prime-power sweep over [1, max x]; per-segment compensated sums
/// merged in segment order, so the result does not depend on thread count.
AverageSeries average(const MultFuncSpec& spec, std::span<const std::uint64_t> x_grid,
                      const AverageOptions& opts = {});
/// Exact rational partial sum; intended for x <= 10^4.
mpq_class average_exact(const MultFuncSpec& spec, std::uint64_t x);

/// Slope of ln(partial sum) against ln ln x; rejects constant series.
LinearFit kappa_fit(const AverageSeries& series);

/// sum over primes p <= x with p = 1 mod V of f(n)/n, n = (p - 1)/V.
double shifted_prime_average(const MultFuncSpec& spec, std::uint64_t x, std::uint64_t modulus);
mpq_class shifted_prime_average_exact(const MultFuncSpec& spec, std::uint64_t x,
                                      std::uint64_t modulus);

}  // namespace omegastar
