#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "omegastar/parallel.hpp"
#include "omegastar/sieves.hpp"
#include "oracles.hpp"

using namespace omegastar;

TEST_CASE("prime tables") {
  const auto p10 = build_primes(10);
  CHECK(std::vector<std::uint32_t>(p10.primes().begin(), p10.primes().end()) ==
        std::vector<std::uint32_t>{2, 3, 5, 7});
  CHECK(build_primes(100).size() == 25);
  SieveOptions small;
  small.segment_length = 1000;
  small.threads = 3;
  const auto a = build_primes(200000, small);
  std::size_t j = 0;
  for (std::uint64_t n = 2; n <= 200000; ++n) {
    if (oracle::is_prime(n)) {
      REQUIRE(j < a.size());
      CHECK(a[j++] == n);
    }
  }
  CHECK(j == a.size());
  CHECK(a.contains(199999));
  CHECK_FALSE(a.contains(199998));
  CHECK_THROWS_AS(build_primes(1), std::invalid_argument);
}

TEST_CASE("memory budget is enforced") {
  SieveOptions tight;
  tight.memory_budget = 1024;
  CHECK_THROWS_AS(build_primes(1'000'000, tight), ResourceError);
  CHECK_THROWS_AS(build_omega_star(1'000'000, tight), ResourceError);
}

TEST_CASE("spf") {
  const auto spf = build_spf(1000);
  CHECK(spf[12] == 2);
  CHECK(spf[35] == 5);
  CHECK(spf[997] == 997);
  for (std::uint64_t n = 1; n <= 1000; ++n) {
    const auto f = factorize(n, spf);
    CHECK(f.value() == n);
    CHECK(f == factorize(n));
  }
}

TEST_CASE("omega star examples") {
  const auto t = build_omega_star(12);
  CHECK(t[12] == 5);
  CHECK(t[1] == 1);
  CHECK(t[9] == 1);
  CHECK(omega_star_single(1) == 1);
  CHECK(omega_star_single(2) == 2);
  CHECK(omega_star_single(12) == 5);
  CHECK_THROWS_AS(build_omega_star(0), std::invalid_argument);
  CHECK_THROWS_AS(t.at(13), std::out_of_range);
}

TEST_CASE("omega star against divisor oracle") {
  const auto t = build_omega_star(5000);
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    CHECK(t[n] == oracle::omega_star(n));
    CHECK(omega_star_single(n) == t[n]);
  }
}

TEST_CASE("table is independent of segment length and threads") {
  SieveOptions a, b, c;
  a.segment_length = 1 << 10;
  a.threads = 1;
  b.segment_length = 777;
  b.threads = 4;
  c.segment_length = 1 << 22;
  c.threads = 8;
  const auto ta = build_omega_star(300000, a);
  CHECK(ta == build_omega_star(300000, b));
  CHECK(ta == build_omega_star(300000, c));
  // Spot checks far from the start.
  for (std::uint64_t n = 299000; n <= 300000; n += 37) CHECK(ta[n] == omega_star_single(n));
}

TEST_CASE("dump round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "omegastar_test_dump";
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.omst";
  const auto t = build_omega_star(12345);
  save_omega_star(t, path);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 8 + 2 * 12345);
  CHECK(load_omega_star(path) == t);
  {
    std::ofstream trunc(dir / "bad.omst", std::ios::binary);
    trunc << "OMST";
  }
  CHECK_THROWS(load_omega_star(dir / "bad.omst"));
  {
    std::ofstream junk(dir / "junk.omst", std::ios::binary);
    junk << "NOPE0000000000000000";
  }
  CHECK_THROWS(load_omega_star(dir / "junk.omst"));
  std::filesystem::remove_all(dir);
}
