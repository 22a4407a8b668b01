#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "omegastar/multfunc.hpp"
#include "oracles.hpp"

using namespace omegastar;

TEST_CASE("rule values") {
  const auto t3 = MultFuncSpec::tau_l(3);
  for (std::uint64_t n = 1; n <= 300; ++n) {
    CHECK(eval(t3, n) == static_cast<double>(oracle::tau(n, 3)));
    CHECK(eval(MultFuncSpec::unit(), n) == 1.0);
    CHECK(eval(MultFuncSpec::squarefree(), n) == (oracle::mobius(n) != 0 ? 1.0 : 0.0));
    const double ratio = static_cast<double>(n) / static_cast<double>(oracle::phi(n));
    CHECK(eval(MultFuncSpec::phi_ratio_power(2), n) == doctest::Approx(ratio * ratio));
    mpq_class inv(static_cast<unsigned long>(oracle::phi(n)), static_cast<unsigned long>(n));
    inv.canonicalize();
    CHECK(eval_exact(MultFuncSpec::phi_ratio_power(-1), n) == inv);
  }
  const auto prod = MultFuncSpec::product({MultFuncSpec::tau_l(2), MultFuncSpec::squarefree()});
  CHECK(eval(prod, 12) == 0.0);
  CHECK(eval(prod, 30) == 8.0);
}

TEST_CASE("custom rule") {
  MultFuncSpec::CustomTable table{{{2, 1}, 3.0}, {{3, 2}, 0.5}};
  const auto with_default = MultFuncSpec::custom(table, 1.0);
  CHECK(eval(with_default, 2) == 3.0);
  CHECK(eval(with_default, 18) == 1.5);
  CHECK(eval(with_default, 5) == 1.0);
  const auto strict = MultFuncSpec::custom(table, std::nullopt);
  CHECK(eval(strict, 2) == 3.0);
  CHECK_THROWS_AS(eval(strict, 5), std::domain_error);
  CHECK_THROWS_AS(MultFuncSpec::custom({{{4, 1}, 1.0}}, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(MultFuncSpec::custom({{{2, 1}, -1.0}}, std::nullopt), std::invalid_argument);
}

TEST_CASE("json round trip") {
  const auto j = nlohmann::json::parse(
      R"({"rule":"product","factors":[{"rule":"tau_l","l":4},{"rule":"phi_ratio_power","s":2},)"
      R"({"rule":"custom","values":[[2,1,0.25]],"default":1}]})");
  const auto spec = MultFuncSpec::from_json(j);
  CHECK(MultFuncSpec::from_json(spec.to_json()).to_json() == spec.to_json());
  CHECK(eval(spec, 2) == doctest::Approx(4 * 4 * 0.25));
  CHECK(MultFuncSpec::from_json(nlohmann::json::parse(R"({"rule":"squarefree_indicator"})")).rule() ==
        MultFuncSpec::Rule::Squarefree);
  CHECK_THROWS_AS(MultFuncSpec::from_json(nlohmann::json::parse(R"({"rule":"nope"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(MultFuncSpec::from_json(nlohmann::json::parse(R"({"rule":"tau_l","l":0})")),
                  std::invalid_argument);
  CHECK_THROWS(MultFuncSpec::from_json(nlohmann::json::parse(R"({"rule":"tau_l"})")));
}

TEST_CASE("averages against direct summation") {
  const std::vector<std::uint64_t> grid{1, 2, 10, 999, 5000, 20000};
  for (const auto& spec : {MultFuncSpec::unit(), MultFuncSpec::tau_l(3),
                           MultFuncSpec::phi_ratio_power(1), MultFuncSpec::squarefree()}) {
    AverageOptions o;
    o.segment_length = 1024;
    o.threads = 3;
    const auto series = average(spec, grid, o);
    REQUIRE(series.points.size() == grid.size());
    long double direct = 0;
    std::size_t g = 0;
    for (std::uint64_t n = 1; n <= grid.back(); ++n) {
      direct += static_cast<long double>(eval(spec, n)) / n;
      if (n == grid[g]) {
        CHECK(series.points[g].sum == doctest::Approx(static_cast<double>(direct)).epsilon(1e-13));
        ++g;
      }
    }
  }
}

TEST_CASE("averages are independent of threads and segments") {
  const std::vector<std::uint64_t> grid{1000, 100000, 300000};
  AverageOptions a, b;
  a.segment_length = 1 << 12;
  a.threads = 1;
  b.segment_length = 1 << 12;
  b.threads = 8;
  const auto sa = average(MultFuncSpec::tau_l(2), grid, a);
  const auto sb = average(MultFuncSpec::tau_l(2), grid, b);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(sa.points[i].sum == sb.points[i].sum);
}

TEST_CASE("exact and floating paths agree") {
  const std::vector<std::uint64_t> grid{2000};
  for (const auto& spec : {MultFuncSpec::unit(), MultFuncSpec::tau_l(2), MultFuncSpec::phi_ratio_power(2)}) {
    const double approx = average(spec, grid).points[0].sum;
    const double exact = average_exact(spec, 2000).get_d();
    CHECK(std::fabs(approx - exact) <= 1e-12 * exact);
  }
  CHECK(average_exact(MultFuncSpec::unit(), 3) == mpq_class(11, 6));
}

TEST_CASE("harmonic sum near ln x + gamma") {
  const std::vector<std::uint64_t> grid{100000};
  const double h = average(MultFuncSpec::unit(), grid).points[0].sum;
  CHECK(std::fabs(h - std::log(1e5) - 0.5772156649) < 1e-4);
}

TEST_CASE("kappa fit") {
  const std::vector<std::uint64_t> grid{1000, 10000, 100000, 1000000};
  double prev = -1;
  for (unsigned l = 1; l <= 4; ++l) {
    const double slope = kappa_fit(average(MultFuncSpec::tau_l(l), grid)).slope;
    CHECK(slope > prev);
    prev = slope;
  }
  AverageSeries flat;
  flat.points = {{10, 2.0}, {100, 2.0}, {1000, 2.0}};
  CHECK_THROWS_AS(kappa_fit(flat), std::invalid_argument);
}

TEST_CASE("shifted prime averages") {
  CHECK(shifted_prime_average_exact(MultFuncSpec::unit(), 7, 2) == mpq_class(11, 6));
  CHECK(shifted_prime_average(MultFuncSpec::unit(), 7, 2) == doctest::Approx(11.0 / 6.0));
  CHECK(shifted_prime_average(MultFuncSpec::unit(), 10, 100) == 0.0);
  CHECK(shifted_prime_average(MultFuncSpec::unit(), 1, 1) == 0.0);
  CHECK_THROWS_AS(shifted_prime_average(MultFuncSpec::unit(), 10, 0), std::invalid_argument);
  // Direct oracle.
  double direct = 0;
  for (std::uint64_t p = 2; p <= 5000; ++p) {
    if (oracle::is_prime(p) && (p - 1) % 4 == 0) {
      const auto n = (p - 1) / 4;
      direct += static_cast<double>(oracle::tau(n, 2)) / static_cast<double>(n);
    }
  }
  CHECK(shifted_prime_average(MultFuncSpec::tau_l(2), 5000, 4) == doctest::Approx(direct).epsilon(1e-12));
  double prev = 0;
  for (unsigned l = 1; l <= 4; ++l) {
    const double v = shifted_prime_average(MultFuncSpec::tau_l(l), 100000, 2);
    CHECK(v > prev);
    prev = v;
  }
}
