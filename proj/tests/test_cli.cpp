#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "omegastar/cli.hpp"

namespace fs = std::filesystem;
using omegastar::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "omegastar_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("argument parsers") {
  using namespace omegastar::cli;
  CHECK(parse_count("1000") == 1000);
  CHECK(parse_count("10^6") == 1000000);
  CHECK(parse_count("3e4") == 30000);
  CHECK(parse_count("1_000") == 1000);
  CHECK_THROWS_AS(parse_count("-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_count("10^30"), std::invalid_argument);
  CHECK(parse_grid("10:1000:10") == std::vector<std::uint64_t>{10, 100, 1000});
  CHECK(parse_grid("10,50,100") == std::vector<std::uint64_t>{10, 50, 100});
  CHECK_THROWS_AS(parse_grid("10,5"), std::invalid_argument);
  CHECK(parse_k_list("2..6") == std::vector<unsigned>{2, 3, 4, 5, 6});
  CHECK(parse_k_list("1,3") == std::vector<unsigned>{1, 3});
  CHECK(parse_k_list("4") == std::vector<unsigned>{4});
  CHECK(parse_threads("auto") == 0);
  CHECK(parse_threads("4") == 4);
  CHECK_THROWS_AS(parse_threads("0"), std::invalid_argument);
}

TEST_CASE("omega command") {
  auto r = call({"omega", "--x", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.find("S_1 = 19") != std::string::npos);
  r = call({"omega", "--x", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("S_1 = 1\n") != std::string::npos);
  CHECK(call({"omega", "--x", "0"}).code == 2);
  CHECK(call({"omega"}).code == 2);
  CHECK(call({"omega", "--x", "ten"}).code == 2);
  CHECK(call({"nonsense"}).code == 2);
  CHECK(call({"omega", "--x", "10", "--format", "xml"}).code == 2);
  r = call({"omega", "--x", "12", "--format", "json"});
  CHECK(nlohmann::json::parse(r.out)["S_1"] == 25);
}

TEST_CASE("omega dump") {
  const auto path = scratch() / "table.omst";
  CHECK(call({"omega", "--x", "1000", "--out", path.string()}).code == 0);
  CHECK(fs::file_size(path) == 16 + 2000);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("pk command") {
  const auto r = call({"pk", "--x", "10", "--k", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("P_2(10)=19") != std::string::npos);
  CHECK(r.out.find("identity-check 45 = 45") != std::string::npos);
  CHECK(call({"pk", "--x", "2000", "--k", "3", "--budget", "10"}).code == 3);
}

TEST_CASE("verify command") {
  auto r = call({"verify", "lemma34", "--k", "4"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["count"] == 11);
  CHECK(j["failures"] == 0);
  CHECK(j["first_counterexample"].is_null());
  CHECK(j["anchor"].get<std::string>().size() > 0);

  r = call({"verify", "lemma21", "--k", "2..6", "--trials", "2000"});
  CHECK(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["failures"] == 0);
  CHECK(j["trials"] == 10000);
  CHECK(j["k"] == nlohmann::json::array({2, 3, 4, 5, 6}));

  CHECK(call({"verify", "no_such_check"}).code == 2);
  CHECK(call({"verify", "profile_census", "--k", "9"}).code == 2);
  for (const char* name : {"us_decomposition", "psi_injectivity", "gk_at_prime",
                           "profile_realization", "skeleton"}) {
    CHECK(call({"verify", name, "--trials", "200"}).code == 0);
  }
}

TEST_CASE("csv outputs") {
  auto r = call({"moments", "--x-grid", "10:100:10", "--k", "1..2"});
  CHECK(r.code == 0);
  CHECK(r.out == "x,k,sum,ratio\n10,1,19,1.9\n10,2,45,1.95432516856\n100,1,249,2.49\n"
                 "100,2,971,2.10849970964\n");
  r = call({"distribution", "--x", "10", "--y-grid", "2,3"});
  CHECK(r.code == 0);
  CHECK(r.out == "x,y,count\n10,2,5\n10,3,4\n");
  r = call({"profile", "--x", "1000", "--j", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("level,count,weight_j\n", 0) == 0);
  for (const auto& out : {r.out}) {
    CHECK(out.find("\r") == std::string::npos);
    CHECK(out.find(",\n") == std::string::npos);
  }
}

TEST_CASE("wirsing and fit commands") {
  auto r = call({"wirsing", "--spec", R"({"rule":"unit"})", "--x-grid", "10:100000:10"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("x,sum,kappa_hat\n", 0) == 0);
  CHECK(call({"wirsing", "--spec", R"({"rule":"bogus"})", "--x", "10"}).code == 2);
  CHECK(call({"wirsing", "--spec", "/nonexistent/spec.json", "--x", "10"}).code == 2);
  r = call({"wirsing", "--spec", R"({"rule":"tau_l","l":2})", "--x-grid", "100,1000", "--shifted", "2"});
  CHECK(r.code == 0);

  const auto path = scratch() / "moments.csv";
  CHECK(call({"moments", "--x-grid", "1000:100000:10", "--k", "1..3", "--out", path.string()}).code == 0);
  r = call({"fit", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("k,slope,intercept,points\n", 0) == 0);
  CHECK(r.err.find("yes") != std::string::npos);
  CHECK(call({"fit", (scratch() / "missing.csv").string()}).code == 2);
}

TEST_CASE("outputs are byte-identical across thread counts") {
  const std::vector<std::vector<std::string>> commands{
      {"moments", "--x-grid", "1000:1000000:10", "--k", "1..4", "--segment", "65536"},
      {"distribution", "--x", "200000", "--y-grid", "2:1024:2"},
      {"profile", "--x", "200000", "--j", "2"},
      {"wirsing", "--spec", R"({"rule":"tau_l","l":3})", "--x-grid", "10:1000000:10"},
      {"verify", "lemma21", "--k", "2..4", "--trials", "5000"},
      {"verify", "profile_realization", "--k", "3..5", "--trials", "3000"},
      {"pk", "--x", "500", "--k", "1..3"},
  };
  const auto dir = scratch();
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string first;
    for (const char* threads : {"1", "4", "8"}) {
      auto args = commands[c];
      const auto path = dir / ("det_" + std::to_string(c) + "_" + threads);
      args.insert(args.end(), {"--threads", threads, "--out", path.string()});
      REQUIRE(call(args).code == 0);
      const auto body = slurp(path);
      CHECK(!body.empty());
      if (first.empty()) {
        first = body;
      } else {
        CHECK(body == first);
      }
    }
  }
}
