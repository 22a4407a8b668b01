#include "omegastar/verify.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "omegastar/arith.hpp"
#include "omegastar/exact.hpp"
#include "omegastar/lcm_algebra.hpp"
#include "omegastar/parallel.hpp"

namespace omegastar {

namespace {

constexpr std::uint64_t kChunkTrials = 2048;
constexpr std::uint64_t kUniformMax = 1'000'000'000ULL;
constexpr std::uint64_t kShiftedPrimeMax = 1'000'000ULL;

// FNV-1a, so stream ids do not depend on the standard library's hash.
std::uint64_t stream_id(const std::string& name, unsigned k) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h ^ (std::uint64_t{k} << 56);
}

struct TrialFailure {
  std::uint64_t trial;
  nlohmann::json detail;
};

nlohmann::json tuple_json(std::span<const std::uint64_t> t) {
  return nlohmann::json(std::vector<std::uint64_t>(t.begin(), t.end()));
}

// Runs fn(trial) -> optional<json> over all trials in fixed-size chunks and
// keeps the lowest failing trial, so the report is schedule independent.
template <class Fn>
void campaign(CheckReport& report, unsigned k, std::uint64_t trials, unsigned threads, Fn&& fn) {
  const std::size_t chunks = static_cast<std::size_t>((trials + kChunkTrials - 1) / kChunkTrials);
  std::vector<std::uint64_t> failures(chunks, 0);
  std::vector<std::optional<TrialFailure>> first(chunks);
  parallel_chunks(chunks, resolve_threads(threads), [&](std::size_t c) {
    const std::uint64_t lo = c * kChunkTrials;
    const std::uint64_t hi = std::min(trials, lo + kChunkTrials);
    for (std::uint64_t n = lo; n < hi; ++n) {
      std::optional<nlohmann::json> bad = fn(n);
      if (!bad) continue;
      ++failures[c];
      if (!first[c]) first[c] = TrialFailure{n, std::move(*bad)};
    }
  });
  report.trials += trials;
  for (std::size_t c = 0; c < chunks; ++c) {
    report.failures += failures[c];
    if (first[c] && !report.first_counterexample) {
      nlohmann::json j = first[c]->detail;
      j["k"] = k;
      j["trial"] = first[c]->trial;
      report.first_counterexample = std::move(j);
    }
  }
}

void record_failure(CheckReport& report, nlohmann::json detail) {
  ++report.failures;
  if (!report.first_counterexample) report.first_counterexample = std::move(detail);
}

struct CheckInfo {
  std::string canonical;
  std::string anchor;
  unsigned k_min;
  unsigned k_max;
  std::vector<unsigned> default_ks;
};

const std::map<std::string, CheckInfo>& registry() {
  static const std::map<std::string, CheckInfo> checks = [] {
    std::map<std::string, CheckInfo> m;
    m["lcm_identity"] = {"lcm_identity",
                         "lcm(t_1..t_k) = prod_{|B| odd} t_B / prod_{|C| even} t_C",
                         2, 16, {2, 3, 4, 5, 6}};
    m["us_decomposition"] = {"us_decomposition",
                             "u_S = t_S / prod_{T > S} u_T; t_S = prod_{T >= S} u_T; "
                             "gcd(U(S1), U(S2)) = U(S1 | S2)",
                             2, 16, {2, 3, 4, 5, 6}};
    m["profile_census"] = {"profile_census",
                           "#{m consistent : D(m) = p} = 2^k - k - 1; D(m) = lcm{m_A}",
                           2, 6, {2, 3, 4, 5, 6}};
    m["psi_injectivity"] = {"psi_injectivity",
                            "psi(alpha) = (min(alpha_i, alpha_j))_{i<j} injective on sum alpha >= 2",
                            2, 20, {3, 4, 5, 6, 7, 8, 9, 10, 11, 12}};
    m["gk_at_prime"] = {"gk_at_prime", "g_k(p) = (2^k - k - 1)(1 - 1/p)^{k-1}", 2, 6,
                        {2, 3, 4, 5, 6}};
    m["profile_realization"] = {"profile_realization",
                                "M_i = lcm{m_A : A contains i}; gcd(M_i, M_j) = m_ij",
                                2, 8, {3, 4, 5, 6, 7, 8}};
    m["skeleton"] = {"skeleton",
                     "a_j = prod_{S contains j, S != T0} u_S distinct, "
                     "prod_{S contains i, not j} u_S coprime to prod_{S contains j, not i} u_S",
                     2, 10, {2, 3, 4, 5, 6}};
    m["lemma21"] = m["lcm_identity"];
    m["lemma34"] = m["profile_census"];
    return m;
  }();
  return checks;
}

std::optional<nlohmann::json> lcm_trial(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t n, unsigned k) {
  const auto t = uniform_tuple(seed, stream, n, k, kUniformMax);
  const auto res = lcm_identity_check(t);
  if (!res.equal) {
    return nlohmann::json{{"tuple", tuple_json(t)}, {"reason", "valuation sides differ"},
                          {"lhs", res.lhs.get_str()}, {"rhs", res.rhs.get_str()}};
  }
  if (auto widened = lcm_identity_check_widened(t); widened && !*widened) {
    return nlohmann::json{{"tuple", tuple_json(t)}, {"reason", "128-bit path disagrees"}};
  }
  return std::nullopt;
}

std::optional<nlohmann::json> us_trial(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t n, unsigned k) {
  const auto t = uniform_tuple(seed, stream, n, k, kUniformMax);
  try {
    const auto dec = us_decompose(t);
    const auto inv = check_us_invariants(dec, t);
    if (!inv.all()) {
      return nlohmann::json{{"tuple", tuple_json(t)},
                            {"reason", "invariant failed"},
                            {"reconstruction", inv.reconstruction},
                            {"product_is_lcm", inv.product_is_lcm},
                            {"coprimality", inv.coprimality}};
    }
  } catch (const CounterexampleError& e) {
    return nlohmann::json{{"tuple", tuple_json(e.tuple())},
                          {"reason", e.what()},
                          {"subset_mask", e.subset().mask()}};
  }
  return std::nullopt;
}

std::optional<nlohmann::json> realization_trial(std::uint64_t seed, std::uint64_t stream,
                                                std::uint64_t n, unsigned k) {
  const auto t = smooth_tuple(seed, stream, n, k);
  const auto m = profile_from_tuple(t);
  auto fail = [&](const char* reason) {
    return nlohmann::json{{"tuple", tuple_json(t)}, {"profile", m.values()}, {"reason", reason}};
  };
  if (!profile_consistent(m)) return fail("profile of a tuple is inconsistent");
  if (!gcd_check_M(m)) return fail("gcd(M_i, M_j) != m_ij");
  if (d_formula(m) != mpq_class(d_lcm(m))) return fail("D(m) != lcm{m_A}");
  std::vector<std::uint64_t> big(k);
  for (unsigned i = 1; i <= k; ++i) big[i - 1] = narrow_u64(big_m(m, i));
  if (!(profile_from_tuple(big) == m)) return fail("M_1..M_k do not realize m");
  return std::nullopt;
}

std::optional<nlohmann::json> skeleton_trial(std::uint64_t seed, std::uint64_t stream,
                                             std::uint64_t n, unsigned k) {
  // Distinct shifted primes: every flag must hold.
  const auto t = shifted_prime_tuple(seed, stream, n, k, kShiftedPrimeMax);
  const auto dec = us_decompose(t);
  for (unsigned nu = 0; nu < k; ++nu) {
    const auto sp = skeleton_products(dec, nu);
    if (!(sp.a_coprime_ok && sp.g_chain_ok && sp.delta_nonzero && sp.delta_prime_nonzero)) {
      return nlohmann::json{{"tuple", tuple_json(t)},
                            {"nu", nu},
                            {"a_coprime_ok", sp.a_coprime_ok},
                            {"g_chain_ok", sp.g_chain_ok},
                            {"delta_nonzero", sp.delta_nonzero},
                            {"delta_prime_nonzero", sp.delta_prime_nonzero}};
    }
  }
  // Smooth tuples may repeat values, so only the structural flags apply.
  const auto s = smooth_tuple(seed, stream + 1, n, k);
  const auto sdec = us_decompose(s);
  for (unsigned nu = 0; nu < k; ++nu) {
    const auto sp = skeleton_products(sdec, nu);
    if (!(sp.a_coprime_ok && sp.g_chain_ok)) {
      return nlohmann::json{{"tuple", tuple_json(s)},
                            {"nu", nu},
                            {"a_coprime_ok", sp.a_coprime_ok},
                            {"g_chain_ok", sp.g_chain_ok}};
    }
  }
  return std::nullopt;
}

mpq_class gk_closed_form(unsigned k, std::uint64_t p) {
  mpq_class base(to_mpz(p - 1), to_mpz(p));
  base.canonicalize();
  mpq_class r = (1u << k) - k - 1;
  for (unsigned i = 1; i < k; ++i) r *= base;
  return r;
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["anchor"] = anchor;
  j["k"] = ks;
  j["trials"] = trials;
  j["failures"] = failures;
  j["first_counterexample"] = first_counterexample ? *first_counterexample : nlohmann::json(nullptr);
  for (const auto& [key, value] : details.items()) j[key] = value;
  return j;
}

std::vector<std::string> check_names() {
  std::vector<std::string> names;
  for (const auto& [name, info] : registry()) names.push_back(name);
  return names;
}

std::vector<unsigned> default_ks(const std::string& check) {
  const auto it = registry().find(check);
  if (it == registry().end()) throw std::invalid_argument("unknown check: " + check);
  return it->second.default_ks;
}

std::vector<std::uint64_t> uniform_tuple(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t trial, unsigned k, std::uint64_t max) {
  SplitMix rng(derive_seed(seed, stream, trial));
  std::vector<std::uint64_t> t(k);
  for (auto& v : t) v = rng.uniform(1, max);
  return t;
}

std::vector<std::uint64_t> smooth_tuple(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t trial, unsigned k) {
  static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11, 13};
  SplitMix rng(derive_seed(seed, stream, trial));
  std::vector<std::uint64_t> t(k, 1);
  for (auto& v : t) {
    for (auto p : primes) {
      for (auto e = rng.uniform(0, 2); e > 0; --e) v *= p;
    }
  }
  return t;
}

std::vector<std::uint64_t> shifted_prime_tuple(std::uint64_t seed, std::uint64_t stream,
                                               std::uint64_t trial, unsigned k,
                                               std::uint64_t max) {
  if (max < 2) throw std::invalid_argument("shifted_prime_tuple: max must be >= 2");
  SplitMix rng(derive_seed(seed, stream, trial));
  std::vector<std::uint64_t> t;
  while (t.size() < k) {
    const std::uint64_t p = rng.uniform(2, max);
    if (!is_prime(p) || std::find(t.begin(), t.end(), p - 1) != t.end()) continue;
    t.push_back(p - 1);
  }
  return t;
}

CheckReport run_check(const std::string& check, const VerifyOptions& opts) {
  const auto it = registry().find(check);
  if (it == registry().end()) throw std::invalid_argument("unknown check: " + check);
  const CheckInfo& info = it->second;
  CheckReport report;
  report.check = info.canonical;
  report.anchor = info.anchor;
  report.ks = opts.ks.empty() ? info.default_ks : opts.ks;
  for (unsigned k : report.ks) {
    if (k < info.k_min || k > info.k_max) {
      throw std::invalid_argument(check + ": k must be in [" + std::to_string(info.k_min) + ", " +
                                  std::to_string(info.k_max) + "]");
    }
  }
  const std::string& name = info.canonical;

  if (name == "lcm_identity" || name == "us_decomposition") {
    for (unsigned k : report.ks) {
      // Both campaigns read the same corpus.
      const std::uint64_t stream = stream_id("lcm_identity", k);
      campaign(report, k, opts.trials, opts.threads, [&](std::uint64_t n) {
        return name == "lcm_identity" ? lcm_trial(opts.seed, stream, n, k)
                                      : us_trial(opts.seed, stream, n, k);
      });
    }
  } else if (name == "profile_realization" || name == "skeleton") {
    for (unsigned k : report.ks) {
      const std::uint64_t stream = stream_id(name, k);
      campaign(report, k, opts.trials, opts.threads, [&](std::uint64_t n) {
        return name == "skeleton" ? skeleton_trial(opts.seed, stream, n, k)
                                  : realization_trial(opts.seed, stream, n, k);
      });
    }
  } else if (name == "profile_census") {
    if (opts.census_max_exp < 1) throw std::invalid_argument("census exponent cap must be >= 1");
    nlohmann::json results = nlohmann::json::array();
    for (unsigned k : report.ks) {
      const std::uint64_t expected = (std::uint64_t{1} << k) - k - 1;
      for (auto p : opts.census_primes) {
        if (!is_prime(p)) throw std::invalid_argument("census primes must be prime");
        const auto c = count_profiles_at_prime(k, p, opts.census_max_exp, opts.threads);
        report.trials += c.enumerated;
        results.push_back({{"k", k},
                           {"p", p},
                           {"max_exp", c.max_exp},
                           {"enumerated", c.enumerated},
                           {"consistent", c.consistent},
                           {"count", c.d_equals_p},
                           {"expected", expected},
                           {"identities_ok", c.all_ok}});
        if (!c.all_ok) {
          record_failure(report, {{"k", k}, {"p", p},
                                  {"profile", c.first_failure ? c.first_failure->values()
                                                              : std::vector<std::uint64_t>{}},
                                  {"reason", "identity failed on a consistent profile"}});
        }
        if (c.d_equals_p != expected) {
          record_failure(report, {{"k", k}, {"p", p}, {"count", c.d_equals_p},
                                  {"reason", "count of profiles with D = p"}});
        }
      }
      if (report.ks.size() == 1) report.details["count"] = results.back()["count"];
    }
    report.details["results"] = results;
  } else if (name == "psi_injectivity") {
    nlohmann::json results = nlohmann::json::array();
    for (unsigned k : report.ks) {
      const auto r = psi_injectivity(k);
      const std::uint64_t expected = (std::uint64_t{1} << k) - k - 1;
      report.trials += r.domain_size;
      results.push_back({{"k", k}, {"domain_size", r.domain_size}, {"image_size", r.image_size},
                         {"expected", expected}, {"injective", r.injective}});
      if (!r.injective || r.image_size != expected) {
        record_failure(report, {{"k", k}, {"image_size", r.image_size}, {"reason", "image size"}});
      }
    }
    report.details["results"] = results;
  } else if (name == "gk_at_prime") {
    nlohmann::json results = nlohmann::json::array();
    for (unsigned k : report.ks) {
      for (auto p : opts.gk_primes) {
        if (!is_prime(p)) throw std::invalid_argument("g_k primes must be prime");
        const mpq_class got = g_k_at_prime(k, p);
        const mpq_class want = gk_closed_form(k, p);
        ++report.trials;
        results.push_back({{"k", k}, {"p", p}, {"g", got.get_str()}, {"expected", want.get_str()}});
        if (got != want) {
          record_failure(report, {{"k", k}, {"p", p}, {"g", got.get_str()},
                                  {"expected", want.get_str()}, {"reason", "g_k(p)"}});
        }
      }
      // The multiplicative extension against direct enumeration, where feasible.
      if (k <= 4) {
        for (std::uint64_t m : {6ULL, 10ULL, 15ULL, 30ULL}) {
          ++report.trials;
          const mpq_class a = g_k(k, m), b = g_k_direct(k, m);
          if (a != b) {
            record_failure(report, {{"k", k}, {"m", m}, {"multiplicative", a.get_str()},
                                    {"direct", b.get_str()}, {"reason", "g_k composite"}});
          }
        }
      }
    }
    report.details["results"] = results;
  }
  return report;
}

}  // namespace omegastar
