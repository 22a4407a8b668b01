#pragma once

// Randomized and exhaustive verification campaigns with JSON reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace omegastar {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

struct VerifyOptions {
  std::vector<unsigned> ks;
  std::uint64_t trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  /// Primes and exponent cap for the exhaustive profile census.
  std::vector<std::uint64_t> census_primes = {2, 3};
  unsigned census_max_exp = 2;
  /// Primes at which g_k is compared with its closed form.
  std::vector<std::uint64_t> gk_primes = {2, 3, 5, 7};
};

struct CheckReport {
  std::string check;
  std::string anchor;
  std::vector<unsigned> ks;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::optional<nlohmann::json> first_counterexample;
  /// Per-check extras (counts, image sizes, ...).
  nlohmann::json details = nlohmann::json::object();

  bool ok() const { return failures == 0; }
  nlohmann::json to_json() const;
};

/// Names accepted by run_check, aliases included.
std::vector<std::string> check_names();
/// Default k range for a check when none is given.
std::vector<unsigned> default_ks(const std::string& check);

/// Throws std::invalid_argument for an unknown check or k outside its range.
CheckReport run_check(const std::string& check, const VerifyOptions& opts);

/// Tuple corpora used by the campaigns; entry i of trial n depends only on
/// (seed, stream, n), never on scheduling.
std::vector<std::uint64_t> uniform_tuple(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t trial, unsigned k, std::uint64_t max);
/// Products of 2, 3, 5, 7, 11, 13 with exponents in {0, 1, 2}: rich in common factors.
std::vector<std::uint64_t> smooth_tuple(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t trial, unsigned k);
/// k distinct values p - 1 with p prime and p <= max.
std::vector<std::uint64_t> shifted_prime_tuple(std::uint64_t seed, std::uint64_t stream,
                                               std::uint64_t trial, unsigned k,
                                               std::uint64_t max);

}  // namespace omegastar
