#include "omegastar/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "omegastar/arith.hpp"
#include "omegastar/exact.hpp"
#include "omegastar/parallel.hpp"

namespace omegastar {

unsigned moment_log_exponent(unsigned k) {
  if (k < 1 || k > 30) throw std::invalid_argument("moment exponent k out of range");
  return (1u << k) - k - 1;
}

namespace {

double moment_ratio(u128 sum, std::uint64_t x, unsigned k) {
  const long double lx = std::log(static_cast<long double>(x));
  const long double scale =
      static_cast<long double>(x) * std::pow(lx, static_cast<long double>(moment_log_exponent(k)));
  return static_cast<double>(static_cast<long double>(sum) / scale);
}

void check_k(unsigned k) {
  if (k < 1 || k > 8) throw std::invalid_argument("moment order k must be in [1, 8]");
}

}  // namespace

std::vector<std::uint64_t> value_histogram(const OmegaStarTable& table, std::uint64_t upto) {
  if (upto > table.x()) throw std::out_of_range("value_histogram beyond table");
  std::vector<std::uint64_t> hist;
  const auto counts = table.counts().first(upto);
  for (auto c : counts) {
    if (c >= hist.size()) hist.resize(std::size_t{c} + 1, 0);
    ++hist[c];
  }
  return hist;
}

MomentRecord moment_sum(const OmegaStarTable& table, unsigned k) {
  return moment_sum(table, k, table.x());
}

MomentRecord moment_sum(const OmegaStarTable& table, unsigned k, std::uint64_t upto) {
  check_k(k);
  const auto hist = value_histogram(table, upto);
  u128 sum = 0;
  for (std::size_t v = 1; v < hist.size(); ++v) {
    if (hist[v] != 0) sum = checked_add(sum, checked_mul(hist[v], checked_pow(v, k)));
  }
  return {upto, k, sum, moment_ratio(sum, upto, k)};
}

std::vector<std::uint64_t> shifted_values(std::uint64_t x) {
  if (x == 0) throw std::invalid_argument("shifted_values requires x >= 1");
  const PrimeTable primes = build_primes(x + 1);
  std::vector<std::uint64_t> out;
  out.reserve(primes.size());
  for (auto p : primes.primes()) out.push_back(std::uint64_t{p} - 1);
  return out;
}

namespace {

class TupleWalker {
 public:
  TupleWalker(std::uint64_t x, unsigned k, std::span<const std::uint64_t> values,
              std::atomic<std::uint64_t>& spent, std::uint64_t budget)
      : x_(x), k_(k), values_(values), spent_(spent), budget_(budget) {
    factorial_.assign(k + 1, 1);
    for (unsigned i = 1; i <= k; ++i) factorial_[i] = factorial_[i - 1] * i;
  }

  TupleTotals run_branch(std::size_t first) {
    totals_ = {};
    local_ = 0;
    descend(1, first, values_[first], 1, 1);
    flush();
    return totals_;
  }

 private:
  void descend(unsigned depth, std::size_t last, std::uint64_t l, std::uint64_t denom,
               std::uint64_t run) {
    if (depth == k_) {
      const std::uint64_t weight = factorial_[k_] / denom;
      totals_.count += weight;
      totals_.floor_sum += static_cast<u128>(weight) * (x_ / l);
      return;
    }
    for (std::size_t idx = last; idx < values_.size(); ++idx) {
      if (++local_ == 4096) flush();
      const std::uint64_t v = values_[idx];
      const u128 nl = static_cast<u128>(l / gcd(l, v)) * v;
      if (nl > x_) continue;
      const std::uint64_t nrun = idx == last ? run + 1 : 1;
      descend(depth + 1, idx, static_cast<std::uint64_t>(nl), denom * nrun, nrun);
    }
  }

  void flush() {
    totals_.nodes += local_;
    if (spent_.fetch_add(local_) + local_ > budget_) {
      throw ResourceError("tuple enumeration exceeded the work budget of " +
                          std::to_string(budget_) + " nodes");
    }
    local_ = 0;
  }

  std::uint64_t x_;
  unsigned k_;
  std::span<const std::uint64_t> values_;
  std::atomic<std::uint64_t>& spent_;
  std::uint64_t budget_;
  std::vector<std::uint64_t> factorial_;
  TupleTotals totals_;
  std::uint64_t local_ = 0;
};

}  // namespace

TupleTotals enumerate_tuples(std::uint64_t x, unsigned k, const TupleOptions& opts) {
  if (x == 0) throw std::invalid_argument("enumerate_tuples requires x >= 1");
  if (k < 1 || k > 12) throw std::invalid_argument("tuple length k must be in [1, 12]");
  const auto values = shifted_values(x);
  std::atomic<std::uint64_t> spent{0};
  std::vector<TupleTotals> parts(values.size());
  parallel_chunks(values.size(), resolve_threads(opts.threads), [&](std::size_t first) {
    TupleWalker walker(x, k, values, spent, opts.budget);
    parts[first] = walker.run_branch(first);
  });
  TupleTotals total;
  for (const auto& p : parts) {
    total.count = checked_add(total.count, p.count);
    total.floor_sum = checked_add(total.floor_sum, p.floor_sum);
    total.nodes += p.nodes;
  }
  return total;
}

u128 p_k_count(std::uint64_t x, unsigned k, const TupleOptions& opts) {
  return enumerate_tuples(x, k, opts).count;
}

u128 moment_via_tuples(std::uint64_t x, unsigned k, const TupleOptions& opts) {
  return enumerate_tuples(x, k, opts).floor_sum;
}

std::vector<DistributionRecord> distribution(const OmegaStarTable& table,
                                             std::span<const std::uint64_t> y_grid) {
  const auto hist = value_histogram(table, table.x());
  // tail[v] = #{n : w(n) >= v}
  std::vector<std::uint64_t> tail(hist.size() + 1, 0);
  for (std::size_t v = hist.size(); v-- > 0;) tail[v] = tail[v + 1] + hist[v];
  std::vector<DistributionRecord> out;
  std::uint64_t prev = 0;
  for (auto y : y_grid) {
    if (y == 0) throw std::invalid_argument("distribution thresholds must be positive");
    if (!out.empty() && y <= prev) throw std::invalid_argument("y grid must be ascending");
    prev = y;
    out.push_back({table.x(), y, y < tail.size() ? tail[y] : 0});
  }
  return out;
}

MarkovReport markov_check(const OmegaStarTable& table, std::span<const unsigned> ks,
                          std::span<const std::uint64_t> y_grid) {
  const auto dist = distribution(table, y_grid);
  MarkovReport report;
  for (unsigned k : ks) {
    const u128 s = moment_sum(table, k).sum;
    for (const auto& rec : dist) {
      ++report.checks;
      u128 bound = 0;
      try {
        bound = s / checked_pow(rec.y, k);
      } catch (const std::range_error&) {
        bound = 0;  // y^k beyond 128 bits exceeds any attainable S_k
      }
      if (rec.count > bound) ++report.violations;
    }
  }
  return report;
}

unsigned dyadic_level(std::uint64_t v) {
  if (v < 2) throw std::invalid_argument("dyadic_level needs v >= 2");
  const long double lv = std::log(static_cast<long double>(v));
  long level = static_cast<long>(std::ceil(lv)) - 1;
  level = std::max(0L, level);
  while (level > 0 && std::exp(static_cast<long double>(level)) >= v) --level;
  while (std::exp(static_cast<long double>(level + 1)) < v) ++level;
  return static_cast<unsigned>(level);
}

namespace {

// e lies strictly between these two rationals.
const mpq_class& e_lower() {
  static const mpq_class v = [] {
    mpq_class q("27182818284590452353602874713526624977572/10000000000000000000000000000000000000000");
    q.canonicalize();
    return q;
  }();
  return v;
}

const mpq_class& e_upper() {
  static const mpq_class v = [] {
    mpq_class q("27182818284590452353602874713526624977573/10000000000000000000000000000000000000000");
    q.canonicalize();
    return q;
  }();
  return v;
}

mpq_class pow_q(const mpq_class& b, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), b.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), b.get_den_mpz_t(), e);
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

DyadicProfile dyadic_profile(const OmegaStarTable& table, unsigned j) {
  if (j < 1) throw std::invalid_argument("dyadic_profile needs j >= 1");
  const auto hist = value_histogram(table, table.x());
  DyadicProfile prof;
  prof.j = j;
  std::vector<mpz_class> inside;
  for (std::size_t v = 2; v < hist.size(); ++v) {
    if (hist[v] == 0) continue;
    const unsigned level = dyadic_level(v);
    // Certify e^level < v <= e^{level+1} with the rational brackets.
    const mpq_class vq(to_mpz(std::uint64_t{v}));
    if (!(pow_q(e_upper(), level) < vq && vq < pow_q(e_lower(), level + 1))) {
      throw std::logic_error("dyadic level of " + std::to_string(v) + " not certified");
    }
    if (level >= prof.levels.size()) {
      const std::size_t old = prof.levels.size();
      prof.levels.resize(level + 1);
      inside.resize(level + 1, mpz_class(0));
      for (std::size_t l = old; l <= level; ++l) prof.levels[l].level = static_cast<unsigned>(l);
    }
    prof.levels[level].count += hist[v];
    inside[level] += to_mpz(std::uint64_t{hist[v]}) * pow_mpz(v, j);
    prof.power_sum +=
        static_cast<long double>(hist[v]) * std::pow(static_cast<long double>(v), j);
  }
  // Exact per level: count * e_lower^{(level+1) j} >= sum of w^j inside, and
  // e_lower < e, so the true cap is larger still.
  prof.cap_inequality = true;
  double best = -1.0;
  for (auto& lvl : prof.levels) {
    const long double lo = std::exp(static_cast<long double>(j) * lvl.level);
    const long double cap = std::exp(static_cast<long double>(j) * (lvl.level + 1));
    lvl.weight = static_cast<double>(lo * lvl.count);
    prof.cap_sum += cap * lvl.count;
    const mpq_class cap_lower =
        pow_q(e_lower(), static_cast<unsigned long>(j) * (lvl.level + 1)) *
        mpq_class(to_mpz(std::uint64_t{lvl.count}));
    if (cap_lower < mpq_class(inside[lvl.level])) prof.cap_inequality = false;
    if (lvl.weight > best) {
      best = lvl.weight;
      prof.argmax_level = lvl.level;
    }
  }
  return prof;
}

std::uint64_t count_profile_tuples(std::span<const Interval> boxes, const PairProfile& m,
                                   const TupleOptions& opts) {
  const auto k = static_cast<unsigned>(boxes.size());
  if (k != m.k()) throw std::invalid_argument("count_profile_tuples: box count must equal k");
  std::uint64_t top = 2;
  for (const auto& b : boxes) {
    if (b.lo > b.hi) throw std::invalid_argument("count_profile_tuples: empty interval");
    top = std::max(top, b.hi);
  }
  const PrimeTable primes = build_primes(top);
  std::vector<std::vector<std::uint64_t>> shifts(k);
  for (unsigned i = 0; i < k; ++i) {
    for (auto p : primes.primes()) {
      if (p >= boxes[i].lo && p <= boxes[i].hi) shifts[i].push_back(std::uint64_t{p} - 1);
    }
  }
  std::uint64_t nodes = 0;
  std::uint64_t count = 0;
  std::vector<std::uint64_t> chosen(k);
  auto dfs = [&](auto&& self, unsigned depth) -> void {
    if (depth == k) {
      ++count;
      return;
    }
    for (auto t : shifts[depth]) {
      if (++nodes > opts.budget) {
        throw ResourceError("count_profile_tuples exceeded the work budget");
      }
      bool ok = true;
      for (unsigned i = 0; i < depth && ok; ++i) ok = gcd(chosen[i], t) == m.at(i + 1, depth + 1);
      if (!ok) continue;
      chosen[depth] = t;
      self(self, depth + 1);
    }
  };
  dfs(dfs, 0);
  return count;
}

std::vector<MomentRecord> ratio_table(const OmegaStarTable& table, std::span<const unsigned> ks,
                                      std::span<const std::uint64_t> x_grid) {
  for (unsigned k : ks) check_k(k);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (x_grid[i] == 0 || x_grid[i] > table.x() || (i > 0 && x_grid[i] <= x_grid[i - 1])) {
      throw std::invalid_argument("x grid must be ascending within the table");
    }
  }
  std::vector<std::uint64_t> hist;
  std::vector<MomentRecord> out;
  std::uint64_t n = 1;
  for (auto x : x_grid) {
    for (; n <= x; ++n) {
      const auto c = table[n];
      if (c >= hist.size()) hist.resize(std::size_t{c} + 1, 0);
      ++hist[c];
    }
    for (unsigned k : ks) {
      u128 sum = 0;
      for (std::size_t v = 1; v < hist.size(); ++v) {
        if (hist[v] != 0) sum = checked_add(sum, checked_mul(hist[v], checked_pow(v, k)));
      }
      out.push_back({x, k, sum, moment_ratio(sum, x, k)});
    }
  }
  return out;
}

std::vector<MomentRecord> ratio_table(std::span<const unsigned> ks,
                                      std::span<const std::uint64_t> x_grid,
                                      const SieveOptions& opts) {
  if (x_grid.empty()) return {};
  const OmegaStarTable table = build_omega_star(x_grid.back(), opts);
  return ratio_table(table, ks, x_grid);
}

LinearFit exponent_fit(unsigned k, std::span<const MomentRecord> records) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    if (r.k != k) continue;
    if (r.x < 3) throw std::invalid_argument("exponent_fit needs x >= 3");
    xs.push_back(std::log(std::log(static_cast<double>(r.x))));
    ys.push_back(std::log(static_cast<double>(static_cast<long double>(r.sum) /
                                              static_cast<long double>(r.x))));
  }
  return least_squares(xs, ys);
}

double first_moment_excess(const MomentRecord& r) {
  if (r.k != 1) throw std::invalid_argument("first_moment_excess needs a k = 1 record");
  return static_cast<double>(static_cast<long double>(r.sum) / static_cast<long double>(r.x) -
                             std::log(std::log(static_cast<long double>(r.x))));
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t a, std::uint64_t b, std::uint64_t factor) {
  if (a == 0 || a > b || factor < 2) throw std::invalid_argument("grid needs 1 <= a <= b, factor >= 2");
  std::vector<std::uint64_t> out;
  for (u128 v = a; v <= b; v *= factor) out.push_back(static_cast<std::uint64_t>(v));
  return out;
}

}  // namespace omegastar
