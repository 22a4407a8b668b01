#include "omegastar/multfunc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "omegastar/arith.hpp"
#include "omegastar/exact.hpp"
#include "omegastar/parallel.hpp"
#include "omegastar/sieves.hpp"

namespace omegastar {

MultFuncSpec MultFuncSpec::unit() { return {}; }

MultFuncSpec MultFuncSpec::tau_l(unsigned l) {
  if (l < 1) throw std::invalid_argument("tau_l rule needs l >= 1");
  MultFuncSpec s;
  s.rule_ = Rule::TauL;
  s.param_ = l;
  return s;
}

MultFuncSpec MultFuncSpec::phi_ratio_power(int power) {
  MultFuncSpec s;
  s.rule_ = Rule::PhiRatioPower;
  s.param_ = power;
  return s;
}

MultFuncSpec MultFuncSpec::squarefree() {
  MultFuncSpec s;
  s.rule_ = Rule::Squarefree;
  return s;
}

MultFuncSpec MultFuncSpec::product(std::vector<MultFuncSpec> factors) {
  if (factors.empty()) throw std::invalid_argument("product rule needs at least one factor");
  MultFuncSpec s;
  s.rule_ = Rule::Product;
  s.factors_ = std::move(factors);
  return s;
}

MultFuncSpec MultFuncSpec::custom(CustomTable values, std::optional<double> fallback) {
  for (const auto& [key, v] : values) {
    if (key.second < 1 || !is_prime(key.first)) {
      throw std::invalid_argument("custom rule keys must be (prime, exponent >= 1)");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("custom values must be finite and >= 0");
  }
  if (fallback && (!(*fallback >= 0.0) || !std::isfinite(*fallback))) {
    throw std::invalid_argument("custom default must be finite and >= 0");
  }
  MultFuncSpec s;
  s.rule_ = Rule::Custom;
  s.table_ = std::move(values);
  s.fallback_ = fallback;
  return s;
}

MultFuncSpec MultFuncSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rule") || !j["rule"].is_string()) {
    throw std::invalid_argument("function spec needs a string \"rule\"");
  }
  const auto rule = j["rule"].get<std::string>();
  if (rule == "unit") return unit();
  if (rule == "tau_l") {
    const auto l = j.at("l").get<long>();
    if (l < 1) throw std::invalid_argument("tau_l rule needs l >= 1");
    return tau_l(static_cast<unsigned>(l));
  }
  if (rule == "phi_ratio_power") return phi_ratio_power(j.at("s").get<int>());
  if (rule == "squarefree" || rule == "squarefree_indicator") return squarefree();
  if (rule == "product") {
    std::vector<MultFuncSpec> factors;
    for (const auto& f : j.at("factors")) factors.push_back(from_json(f));
    return product(std::move(factors));
  }
  if (rule == "custom") {
    CustomTable table;
    for (const auto& row : j.at("values")) {
      if (!row.is_array() || row.size() != 3) {
        throw std::invalid_argument("custom values rows are [p, e, v]");
      }
      table[{row[0].get<std::uint64_t>(), row[1].get<unsigned>()}] = row[2].get<double>();
    }
    std::optional<double> fallback;
    if (j.contains("default") && !j["default"].is_null()) fallback = j["default"].get<double>();
    return custom(std::move(table), fallback);
  }
  throw std::invalid_argument("unknown rule: " + rule);
}

nlohmann::json MultFuncSpec::to_json() const {
  switch (rule_) {
    case Rule::Unit:
      return {{"rule", "unit"}};
    case Rule::TauL:
      return {{"rule", "tau_l"}, {"l", param_}};
    case Rule::PhiRatioPower:
      return {{"rule", "phi_ratio_power"}, {"s", param_}};
    case Rule::Squarefree:
      return {{"rule", "squarefree"}};
    case Rule::Product: {
      nlohmann::json fs = nlohmann::json::array();
      for (const auto& f : factors_) fs.push_back(f.to_json());
      return {{"rule", "product"}, {"factors", fs}};
    }
    case Rule::Custom: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& [key, v] : table_) rows.push_back({key.first, key.second, v});
      nlohmann::json out = {{"rule", "custom"}, {"values", rows}};
      if (fallback_) out["default"] = *fallback_;
      return out;
    }
  }
  return {};
}

double MultFuncSpec::at_prime_power(std::uint64_t p, unsigned e) const {
  if (e == 0) return 1.0;
  switch (rule_) {
    case Rule::Unit:
      return 1.0;
    case Rule::TauL:
      return static_cast<double>(binomial(e + static_cast<unsigned>(param_) - 1,
                                          static_cast<unsigned>(param_) - 1));
    case Rule::PhiRatioPower:
      return std::pow(static_cast<double>(p) / static_cast<double>(p - 1),
                      static_cast<double>(param_));
    case Rule::Squarefree:
      return e == 1 ? 1.0 : 0.0;
    case Rule::Product: {
      double r = 1.0;
      for (const auto& f : factors_) r *= f.at_prime_power(p, e);
      return r;
    }
    case Rule::Custom: {
      auto it = table_.find({p, e});
      if (it != table_.end()) return it->second;
      if (fallback_) return *fallback_;
      throw std::domain_error("custom function has no value at " + std::to_string(p) + "^" +
                              std::to_string(e) + " and no default");
    }
  }
  return 0.0;
}

mpq_class MultFuncSpec::at_prime_power_exact(std::uint64_t p, unsigned e) const {
  if (e == 0) return 1;
  switch (rule_) {
    case Rule::Unit:
      return 1;
    case Rule::TauL:
      return mpq_class(to_mpz(binomial(e + static_cast<unsigned>(param_) - 1,
                                       static_cast<unsigned>(param_) - 1)));
    case Rule::PhiRatioPower: {
      const unsigned long s = static_cast<unsigned long>(std::labs(param_));
      mpq_class r(pow_mpz(p, s), pow_mpz(p - 1, s));
      r.canonicalize();
      return param_ >= 0 ? r : mpq_class(1) / r;
    }
    case Rule::Squarefree:
      return e == 1 ? 1 : 0;
    case Rule::Product: {
      mpq_class r = 1;
      for (const auto& f : factors_) r *= f.at_prime_power_exact(p, e);
      return r;
    }
    case Rule::Custom:
      return mpq_class(at_prime_power(p, e));
  }
  return 0;
}

double eval(const MultFuncSpec& spec, std::uint64_t n) {
  double r = 1.0;
  for (const auto& [p, e] : factorize(n)) r *= spec.at_prime_power(p, e);
  return r;
}

mpq_class eval_exact(const MultFuncSpec& spec, std::uint64_t n) {
  mpq_class r = 1;
  for (const auto& [p, e] : factorize(n)) r *= spec.at_prime_power_exact(p, e);
  return r;
}

AverageSeries average(const MultFuncSpec& spec, std::span<const std::uint64_t> x_grid,
                      const AverageOptions& opts) {
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (x_grid[i] == 0 || (i > 0 && x_grid[i] <= x_grid[i - 1])) {
      throw std::invalid_argument("x grid must be positive and ascending");
    }
  }
  AverageSeries series;
  if (x_grid.empty()) return series;
  const std::uint64_t top = x_grid.back();
  std::uint64_t root = 1;
  while ((root + 1) * (root + 1) <= top) ++root;
  std::vector<std::uint64_t> small;
  if (root >= 2) {
    const auto table = build_primes(root);
    small.assign(table.primes().begin(), table.primes().end());
  }
  std::vector<double> first_power(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) first_power[i] = spec.at_prime_power(small[i], 1);

  struct Part {
    CompensatedSum total;
    std::vector<std::pair<std::size_t, CompensatedSum>> snaps;
  };
  const std::uint64_t seg = std::max<std::size_t>(opts.segment_length, 1024);
  const std::size_t chunks = static_cast<std::size_t>((top + seg - 1) / seg);
  std::vector<Part> parts(chunks);
  parallel_chunks(chunks, resolve_threads(opts.threads), [&](std::size_t c) {
    const std::uint64_t lo = 1 + c * seg;
    const std::uint64_t hi = std::min(top, lo + seg - 1);
    const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
    std::vector<std::uint64_t> rem(len);
    std::vector<double> val(len, 1.0);
    for (std::size_t i = 0; i < len; ++i) rem[i] = lo + i;
    for (std::size_t pi = 0; pi < small.size(); ++pi) {
      const std::uint64_t p = small[pi];
      for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) {
        const std::size_t i = static_cast<std::size_t>(m - lo);
        unsigned e = 0;
        do {
          rem[i] /= p;
          ++e;
        } while (rem[i] % p == 0);
        val[i] *= e == 1 ? first_power[pi] : spec.at_prime_power(p, e);
      }
    }
    Part& part = parts[c];
    auto gi = static_cast<std::size_t>(
        std::lower_bound(x_grid.begin(), x_grid.end(), lo) - x_grid.begin());
    for (std::size_t i = 0; i < len; ++i) {
      if (rem[i] > 1) val[i] *= spec.at_prime_power(rem[i], 1);
      const std::uint64_t n = lo + i;
      part.total.add(val[i] / static_cast<double>(n));
      if (gi < x_grid.size() && x_grid[gi] == n) {
        part.snaps.emplace_back(gi, part.total);
        ++gi;
      }
    }
  });

  CompensatedSum running;
  for (const auto& part : parts) {
    for (const auto& [gi, local] : part.snaps) {
      CompensatedSum at = running;
      at.add(local);
      series.points.push_back({x_grid[gi], at.value()});
    }
    running.add(part.total);
  }
  return series;
}

mpq_class average_exact(const MultFuncSpec& spec, std::uint64_t x) {
  mpq_class sum = 0;
  for (std::uint64_t n = 1; n <= x; ++n) sum += eval_exact(spec, n) / mpq_class(to_mpz(n));
  return sum;
}

LinearFit kappa_fit(const AverageSeries& series) {
  std::vector<double> xs, ys;
  bool constant = true;
  for (const auto& pt : series.points) {
    if (pt.x < 3) continue;
    if (!ys.empty() && std::log(pt.sum) != ys.front()) constant = false;
    xs.push_back(std::log(std::log(static_cast<double>(pt.x))));
    ys.push_back(std::log(pt.sum));
  }
  if (xs.size() >= 2 && constant) throw std::invalid_argument("kappa_fit: partial sums are constant");
  return least_squares(xs, ys);
}

double shifted_prime_average(const MultFuncSpec& spec, std::uint64_t x, std::uint64_t modulus) {
  if (modulus == 0) throw std::invalid_argument("modulus must be >= 1");
  if (x < 2) return 0.0;
  CompensatedSum sum;
  const auto primes = build_primes(x);
  for (auto p : primes.primes()) {
    const std::uint64_t t = p - 1;
    if (t < modulus || t % modulus != 0) continue;
    const std::uint64_t n = t / modulus;
    sum.add(eval(spec, n) / static_cast<double>(n));
  }
  return sum.value();
}

mpq_class shifted_prime_average_exact(const MultFuncSpec& spec, std::uint64_t x,
                                      std::uint64_t modulus) {
  if (modulus == 0) throw std::invalid_argument("modulus must be >= 1");
  mpq_class sum = 0;
  if (x < 2) return sum;
  const auto primes = build_primes(x);
  for (auto p : primes.primes()) {
    const std::uint64_t t = p - 1;
    if (t < modulus || t % modulus != 0) continue;
    const std::uint64_t n = t / modulus;
    sum += eval_exact(spec, n) / mpq_class(to_mpz(n));
  }
  return sum;
}

}  // namespace omegastar
