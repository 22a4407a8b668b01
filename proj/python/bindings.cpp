#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "omegastar/cli.hpp"
#include "omegastar/lcm_algebra.hpp"
#include "omegastar/moments.hpp"
#include "omegastar/multfunc.hpp"
#include "omegastar/parallel.hpp"
#include "omegastar/verify.hpp"

namespace py = pybind11;
using namespace omegastar;

namespace {

py::int_ to_py(u128 v) { return py::int_(py::str(to_string(v))); }
py::int_ to_py(const mpz_class& v) { return py::int_(py::str(v.get_str())); }

py::object to_fraction(const mpq_class& q) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_py(mpz_class(q.get_num())), to_py(mpz_class(q.get_den())));
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

MultFuncSpec spec_from(const py::object& spec) {
  const std::string text = py::isinstance<py::str>(spec)
                               ? spec.cast<std::string>()
                               : py::module_::import("json").attr("dumps")(spec).cast<std::string>();
  return MultFuncSpec::from_json(nlohmann::json::parse(text));
}

SieveOptions sieve(unsigned threads) {
  SieveOptions o;
  o.threads = threads;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shifted-prime divisor function w*(n) and related exact computations";

  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<CounterexampleError>(m, "CounterexampleError", PyExc_AssertionError);

  m.def(
      "omega_star_table",
      [](std::uint64_t x, unsigned threads) {
        const auto t = build_omega_star(x, sieve(threads));
        const auto c = t.counts();
        return py::array_t<std::uint16_t>(static_cast<py::ssize_t>(c.size()), c.data());
      },
      py::arg("x"), py::arg("threads") = 0, "w*(1..x) as a uint16 array (index 0 is n = 1)");
  m.def("omega_star", &omega_star_single, py::arg("n"));

  m.def(
      "moment_sum",
      [](std::uint64_t x, unsigned k, unsigned threads) {
        return to_py(moment_sum(build_omega_star(x, sieve(threads)), k).sum);
      },
      py::arg("x"), py::arg("k"), py::arg("threads") = 0);
  m.def(
      "p_k_count",
      [](std::uint64_t x, unsigned k, std::uint64_t budget, unsigned threads) {
        return to_py(p_k_count(x, k, {budget, threads}));
      },
      py::arg("x"), py::arg("k"), py::arg("budget") = kDefaultWorkBudget, py::arg("threads") = 0);
  m.def(
      "moment_via_tuples",
      [](std::uint64_t x, unsigned k, std::uint64_t budget, unsigned threads) {
        return to_py(moment_via_tuples(x, k, {budget, threads}));
      },
      py::arg("x"), py::arg("k"), py::arg("budget") = kDefaultWorkBudget, py::arg("threads") = 0);
  m.def(
      "distribution",
      [](std::uint64_t x, const std::vector<std::uint64_t>& ys) {
        std::vector<std::uint64_t> counts;
        for (const auto& r : distribution(build_omega_star(x), ys)) counts.push_back(r.count);
        return counts;
      },
      py::arg("x"), py::arg("y_grid"), "N(x, y) for each y");
  m.def(
      "markov_check",
      [](std::uint64_t x, const std::vector<unsigned>& ks, const std::vector<std::uint64_t>& ys) {
        return markov_check(build_omega_star(x), ks, ys).ok();
      },
      py::arg("x"), py::arg("ks"), py::arg("y_grid"));
  m.def(
      "dyadic_profile",
      [](std::uint64_t x, unsigned j) {
        const auto p = dyadic_profile(build_omega_star(x), j);
        py::list levels;
        for (const auto& l : p.levels) levels.append(py::make_tuple(l.level, l.count, l.weight));
        py::dict d;
        d["levels"] = levels;
        d["argmax_level"] = p.argmax_level;
        d["cap_inequality"] = p.cap_inequality;
        return d;
      },
      py::arg("x"), py::arg("j"));

  m.def(
      "lcm_identity_check",
      [](const std::vector<std::uint64_t>& t) {
        const auto r = lcm_identity_check(t);
        return py::make_tuple(to_py(r.lhs), to_fraction(r.rhs), r.equal);
      },
      py::arg("t"), "(lcm, inclusion-exclusion product, equal)");
  m.def(
      "us_decompose",
      [](const std::vector<std::uint64_t>& t) {
        const auto d = us_decompose(t);
        py::dict out;
        for (auto s : subsets_descending(d.k)) {
          py::list members;
          for (unsigned i = 1; i <= d.k; ++i) {
            if (s.contains(i)) members.append(i);
          }
          out[py::tuple(members)] = d.u[s];
        }
        return out;
      },
      py::arg("t"), "u_S keyed by the tuple of elements of S (1-based)");
  m.def(
      "profile_consistent",
      [](unsigned k, std::vector<std::uint64_t> values) {
        return profile_consistent(PairProfile(k, std::move(values)));
      },
      py::arg("k"), py::arg("values"), "values in pair order (1,2), (1,3), ..., (k-1,k)");
  m.def(
      "profile_from_tuple",
      [](const std::vector<std::uint64_t>& t) { return profile_from_tuple(t).values(); },
      py::arg("t"));
  m.def(
      "d_formula",
      [](unsigned k, std::vector<std::uint64_t> values) {
        return to_fraction(d_formula(PairProfile(k, std::move(values))));
      },
      py::arg("k"), py::arg("values"));
  m.def(
      "count_profiles_at_prime",
      [](unsigned k, std::uint64_t p, unsigned max_exp, unsigned threads) {
        const auto c = count_profiles_at_prime(k, p, max_exp, threads);
        return py::make_tuple(c.d_equals_p, c.all_ok);
      },
      py::arg("k"), py::arg("p"), py::arg("max_exp") = 2, py::arg("threads") = 0);
  m.def(
      "psi_image_size", [](unsigned k) { return psi_injectivity(k).image_size; }, py::arg("k"));
  m.def(
      "g_k_at_prime", [](unsigned k, std::uint64_t p) { return to_fraction(g_k_at_prime(k, p)); },
      py::arg("k"), py::arg("p"));
  m.def(
      "g_k", [](unsigned k, std::uint64_t n) { return to_fraction(g_k(k, n)); }, py::arg("k"),
      py::arg("m"));

  m.def(
      "average",
      [](const py::object& spec, const std::vector<std::uint64_t>& grid, unsigned threads) {
        AverageOptions o;
        o.threads = threads;
        std::vector<double> sums;
        for (const auto& pt : average(spec_from(spec), grid, o).points) sums.push_back(pt.sum);
        return sums;
      },
      py::arg("spec"), py::arg("x_grid"), py::arg("threads") = 0,
      "sum_{n <= x} f(n)/n at each grid point; spec is a dict or JSON string");
  m.def(
      "average_exact",
      [](const py::object& spec, std::uint64_t x) { return to_fraction(average_exact(spec_from(spec), x)); },
      py::arg("spec"), py::arg("x"));
  m.def(
      "shifted_prime_average",
      [](const py::object& spec, std::uint64_t x, std::uint64_t modulus) {
        return shifted_prime_average(spec_from(spec), x, modulus);
      },
      py::arg("spec"), py::arg("x"), py::arg("modulus"));

  m.def(
      "run_check",
      [](const std::string& name, std::vector<unsigned> ks, std::uint64_t trials,
         std::uint64_t seed, unsigned threads) {
        VerifyOptions o;
        o.ks = std::move(ks);
        o.trials = trials;
        o.seed = seed;
        o.threads = threads;
        return to_py(run_check(name, o).to_json());
      },
      py::arg("name"), py::arg("ks") = std::vector<unsigned>{}, py::arg("trials") = 100000,
      py::arg("seed") = kDefaultSeed, py::arg("threads") = 0, "JSON report as a dict");
  m.def("check_names", &check_names);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command line; returns (exit_code, stdout, stderr)");
}
