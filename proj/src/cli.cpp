#include "omegastar/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "omegastar/io.hpp"
#include "omegastar/lcm_algebra.hpp"
#include "omegastar/moments.hpp"
#include "omegastar/multfunc.hpp"
#include "omegastar/parallel.hpp"
#include "omegastar/sieves.hpp"
#include "omegastar/verify.hpp"

namespace omegastar::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::uint64_t parse_digits(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("not a nonnegative integer: '" + s + "'");
  }
  u128 v = 0;
  for (char c : s) {
    v = v * 10 + static_cast<unsigned>(c - '0');
    if (v > UINT64_MAX) throw std::invalid_argument("integer too large: " + s);
  }
  return static_cast<std::uint64_t>(v);
}

u128 parse_u128(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer field");
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("not an integer: '" + s + "'");
    v = checked_add(checked_mul(v, 10), static_cast<unsigned>(c - '0'));
  }
  return v;
}

std::string render(u128 v) { return to_string(v); }

json sum_json(u128 v) {
  if (v <= UINT64_MAX) return json(static_cast<std::uint64_t>(v));
  return json(to_string(v));
}

struct Config {
  std::string threads = "auto";
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t budget = kDefaultWorkBudget;
  std::size_t segment = std::size_t{1} << 22;
  std::size_t memory_mb = 1024;

  std::string x;
  std::string x_grid;
  std::string k;
  std::string y_grid = "2:65536:2";
  unsigned j = 1;
  std::string spec;
  std::uint64_t shifted = 0;
  std::uint64_t trials = 100000;
  unsigned max_exp = 2;
  std::string primes = "2,3";
  std::string check;
  std::string input;
};

SieveOptions sieve_options(const Config& c) {
  SieveOptions o;
  o.segment_length = c.segment;
  o.memory_budget = c.memory_mb << 20;
  o.threads = parse_threads(c.threads);
  return o;
}

TupleOptions tuple_options(const Config& c) {
  return {c.budget, parse_threads(c.threads)};
}

void require_format(const Config& c) {
  if (c.format != "csv" && c.format != "json") {
    throw std::invalid_argument("--format must be csv or json");
  }
}

void emit(const Config& c, const std::string& content, std::ostream& out) {
  if (c.out.empty()) {
    out << content;
  } else {
    write_file_atomic(c.out, content);
  }
}

std::uint64_t positive_x(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("--x is required");
  const auto x = parse_count(s);
  if (x < 1) throw std::invalid_argument("--x must be >= 1");
  return x;
}

std::vector<std::uint64_t> x_values(const Config& c) {
  if (!c.x_grid.empty()) return parse_grid(c.x_grid);
  if (!c.x.empty()) return {positive_x(c.x)};
  throw std::invalid_argument("--x-grid or --x is required");
}

int cmd_omega(const Config& c, std::ostream& out) {
  const auto x = positive_x(c.x);
  const auto table = build_omega_star(x, sieve_options(c));
  const auto s1 = moment_sum(table, 1);
  std::uint64_t argmax = 1;
  unsigned best = table[1];
  for (std::uint64_t n = 2; n <= x; ++n) {
    if (table[n] > best) {
      best = table[n];
      argmax = n;
    }
  }
  if (!c.out.empty()) save_omega_star(table, c.out);
  if (c.format == "json") {
    out << json{{"x", x}, {"S_1", sum_json(s1.sum)}, {"max", best}, {"argmax", argmax}}.dump()
        << "\n";
  } else {
    out << "x = " << x << "\nS_1 = " << render(s1.sum) << "\nmax = " << best
        << "\nargmax = " << argmax << "\n";
  }
  return kOk;
}

int cmd_moments(const Config& c, std::ostream& out) {
  const auto grid = x_values(c);
  const auto ks = parse_k_list(c.k.empty() ? "1..3" : c.k);
  const auto records = ratio_table(ks, grid, sieve_options(c));
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : records) {
      arr.push_back({{"x", r.x}, {"k", r.k}, {"sum", sum_json(r.sum)}, {"ratio", format_sig12(r.ratio)}});
    }
    emit(c, arr.dump(2) + "\n", out);
  } else {
    CsvWriter csv({"x", "k", "sum", "ratio"});
    for (const auto& r : records) {
      csv.row({std::to_string(r.x), std::to_string(r.k), render(r.sum), format_sig12(r.ratio)});
    }
    emit(c, csv.str(), out);
  }
  return kOk;
}

int cmd_pk(const Config& c, std::ostream& out) {
  const auto x = positive_x(c.x);
  const auto ks = parse_k_list(c.k.empty() ? "2" : c.k);
  const auto table = build_omega_star(x, sieve_options(c));
  bool ok = true;
  json arr = json::array();
  std::ostringstream text;
  for (unsigned k : ks) {
    const auto totals = enumerate_tuples(x, k, tuple_options(c));
    const auto direct = moment_sum(table, k).sum;
    const bool match = totals.floor_sum == direct;
    ok = ok && match;
    text << "P_" << k << "(" << x << ")=" << render(totals.count) << "\n"
         << "identity-check " << render(totals.floor_sum) << (match ? " = " : " != ")
         << render(direct) << "\n";
    arr.push_back({{"x", x},
                   {"k", k},
                   {"P_k", sum_json(totals.count)},
                   {"tuple_sum", sum_json(totals.floor_sum)},
                   {"moment_sum", sum_json(direct)},
                   {"equal", match}});
  }
  emit(c, c.format == "json" ? arr.dump(2) + "\n" : text.str(), out);
  return ok ? kOk : kVerificationFailed;
}

int cmd_verify(const Config& c, std::ostream& out) {
  VerifyOptions o;
  if (!c.k.empty()) o.ks = parse_k_list(c.k);
  o.trials = c.trials;
  o.seed = c.seed;
  o.threads = parse_threads(c.threads);
  o.census_max_exp = c.max_exp;
  o.census_primes.clear();
  for (const auto& p : split(c.primes, ',')) o.census_primes.push_back(parse_count(p));
  const auto report = run_check(c.check, o);
  const std::string body = report.to_json().dump(2) + "\n";
  out << body;
  if (!c.out.empty()) write_file_atomic(c.out, body);
  return report.ok() ? kOk : kVerificationFailed;
}

int cmd_distribution(const Config& c, std::ostream& out, std::ostream& err) {
  const auto x = positive_x(c.x);
  const auto ys = parse_grid(c.y_grid);
  const auto ks = parse_k_list(c.k.empty() ? "1..4" : c.k);
  const auto table = build_omega_star(x, sieve_options(c));
  const auto records = distribution(table, ys);
  const auto markov = markov_check(table, ks, ys);
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& r : records) arr.push_back({{"x", r.x}, {"y", r.y}, {"count", r.count}});
    json body = {{"records", arr},
                 {"markov", {{"checks", markov.checks}, {"violations", markov.violations}}}};
    emit(c, body.dump(2) + "\n", out);
  } else {
    CsvWriter csv({"x", "y", "count"});
    for (const auto& r : records) {
      csv.row({std::to_string(r.x), std::to_string(r.y), std::to_string(r.count)});
    }
    emit(c, csv.str(), out);
  }
  err << "markov checks=" << markov.checks << " violations=" << markov.violations << "\n";
  return markov.ok() ? kOk : kVerificationFailed;
}

int cmd_profile(const Config& c, std::ostream& out, std::ostream& err) {
  const auto x = positive_x(c.x);
  if (c.j < 1) throw std::invalid_argument("--j must be >= 1");
  const auto table = build_omega_star(x, sieve_options(c));
  const auto prof = dyadic_profile(table, c.j);
  if (c.format == "json") {
    json levels = json::array();
    for (const auto& l : prof.levels) {
      levels.push_back({{"level", l.level}, {"count", l.count}, {"weight_j", format_sig12(l.weight)}});
    }
    json body = {{"x", x},
                 {"j", c.j},
                 {"levels", levels},
                 {"argmax_level", prof.argmax_level},
                 {"cap_sum", format_sig12(static_cast<double>(prof.cap_sum))},
                 {"power_sum", format_sig12(static_cast<double>(prof.power_sum))},
                 {"cap_inequality", prof.cap_inequality}};
    emit(c, body.dump(2) + "\n", out);
  } else {
    CsvWriter csv({"level", "count", "weight_j"});
    for (const auto& l : prof.levels) {
      csv.row({std::to_string(l.level), std::to_string(l.count), format_sig12(l.weight)});
    }
    emit(c, csv.str(), out);
  }
  err << "argmax_level=" << prof.argmax_level
      << " cap_inequality=" << (prof.cap_inequality ? "true" : "false") << "\n";
  return prof.cap_inequality ? kOk : kVerificationFailed;
}

MultFuncSpec load_spec(const std::string& arg) {
  if (arg.empty()) throw std::invalid_argument("--spec is required");
  std::string text = arg;
  if (arg.front() != '{') {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("cannot open spec file: " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return MultFuncSpec::from_json(json::parse(text));
}

int cmd_wirsing(const Config& c, std::ostream& out) {
  const auto spec = load_spec(c.spec);
  const auto grid = x_values(c);
  AverageSeries series;
  if (c.shifted > 0) {
    for (auto x : grid) series.points.push_back({x, shifted_prime_average(spec, x, c.shifted)});
  } else {
    AverageOptions o;
    o.threads = parse_threads(c.threads);
    o.segment_length = std::min<std::size_t>(c.segment, std::size_t{1} << 18);
    series = average(spec, grid, o);
  }
  // kappa_hat at x: slope of ln(sum) on ln ln x over the grid points up to x.
  std::vector<double> lx, ly;
  std::vector<std::string> kappa;
  for (const auto& pt : series.points) {
    if (pt.x >= 3) {
      lx.push_back(std::log(std::log(static_cast<double>(pt.x))));
      ly.push_back(std::log(pt.sum));
    }
    kappa.push_back(lx.size() >= 2 ? format_sig12(least_squares(lx, ly).slope) : "nan");
  }
  if (c.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      arr.push_back({{"x", series.points[i].x},
                     {"sum", format_sig12(series.points[i].sum)},
                     {"kappa_hat", kappa[i]}});
    }
    emit(c, json{{"spec", spec.to_json()}, {"points", arr}}.dump(2) + "\n", out);
  } else {
    CsvWriter csv({"x", "sum", "kappa_hat"});
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      csv.row({std::to_string(series.points[i].x), format_sig12(series.points[i].sum), kappa[i]});
    }
    emit(c, csv.str(), out);
  }
  return kOk;
}

std::vector<MomentRecord> read_moments_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,k,sum,ratio") {
    throw std::invalid_argument(path + ": expected header x,k,sum,ratio");
  }
  std::vector<MomentRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 4) throw std::invalid_argument(path + ": malformed row: " + line);
    MomentRecord r;
    r.x = parse_digits(cells[0]);
    r.k = static_cast<unsigned>(parse_digits(cells[1]));
    r.sum = parse_u128(cells[2]);
    r.ratio = std::stod(cells[3]);
    records.push_back(r);
  }
  return records;
}

int cmd_fit(const Config& c, std::ostream& out, std::ostream& err) {
  const auto records = read_moments_csv(c.input);
  std::vector<unsigned> ks;
  for (const auto& r : records) {
    if (r.x >= 3 && std::find(ks.begin(), ks.end(), r.k) == ks.end()) ks.push_back(r.k);
  }
  std::sort(ks.begin(), ks.end());
  std::vector<MomentRecord> usable;
  std::copy_if(records.begin(), records.end(), std::back_inserter(usable),
               [](const MomentRecord& r) { return r.x >= 3; });
  std::vector<LinearFit> fits;
  for (unsigned k : ks) fits.push_back(exponent_fit(k, usable));
  bool increasing = true;
  for (std::size_t i = 1; i < fits.size(); ++i) increasing = increasing && fits[i].slope > fits[i - 1].slope;
  if (c.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      arr.push_back({{"k", ks[i]},
                     {"slope", format_sig12(fits[i].slope)},
                     {"intercept", format_sig12(fits[i].intercept)},
                     {"points", fits[i].points}});
    }
    emit(c, json{{"fits", arr}, {"strictly_increasing", increasing}}.dump(2) + "\n", out);
  } else {
    CsvWriter csv({"k", "slope", "intercept", "points"});
    for (std::size_t i = 0; i < ks.size(); ++i) {
      csv.row({std::to_string(ks[i]), format_sig12(fits[i].slope),
               format_sig12(fits[i].intercept), std::to_string(fits[i].points)});
    }
    emit(c, csv.str(), out);
  }
  err << "slopes strictly increasing in k: " << (increasing ? "yes" : "no") << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Config& c, bool with_out = true) {
  sub->add_option("--threads", c.threads, "worker threads or 'auto' (default: SDL_THREADS, then all cores)");
  if (with_out) sub->add_option("--out", c.out, "output file (written atomically); default stdout");
  sub->add_option("--format", c.format, "csv or json");
}

void add_sieve(CLI::App* sub, Config& c) {
  sub->add_option("--segment", c.segment, "sieve segment length");
  sub->add_option("--memory-mb", c.memory_mb, "table memory budget in MiB");
}

}  // namespace

std::uint64_t parse_count(const std::string& raw) {
  std::string s;
  std::copy_if(raw.begin(), raw.end(), std::back_inserter(s), [](char ch) { return ch != '_'; });
  std::uint64_t mantissa = 0;
  std::uint64_t base = 10;
  std::uint64_t exp = 0;
  if (auto caret = s.find('^'); caret != std::string::npos) {
    mantissa = 1;
    base = parse_digits(s.substr(0, caret));
    exp = parse_digits(s.substr(caret + 1));
  } else if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = parse_digits(s.substr(0, e));
    exp = parse_digits(s.substr(e + 1));
  } else {
    return parse_digits(s);
  }
  if (exp > 64) throw std::invalid_argument("integer too large: " + raw);
  u128 v = mantissa;
  for (std::uint64_t i = 0; i < exp; ++i) {
    v *= base;
    if (v > UINT64_MAX) throw std::invalid_argument("integer too large: " + raw);
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_grid(const std::string& s) {
  std::vector<std::uint64_t> grid;
  const auto parts = split(s, ':');
  if (parts.size() == 3) {
    grid = geometric_grid(parse_count(parts[0]), parse_count(parts[1]), parse_count(parts[2]));
  } else if (parts.size() == 1) {
    for (const auto& item : split(s, ',')) grid.push_back(parse_count(item));
  } else {
    throw std::invalid_argument("grid must be a:b:factor or a comma list: " + s);
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw std::invalid_argument("grid must be positive and strictly ascending: " + s);
    }
  }
  return grid;
}

std::vector<unsigned> parse_k_list(const std::string& s) {
  std::vector<unsigned> ks;
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const auto lo = parse_digits(s.substr(0, dots));
    const auto hi = parse_digits(s.substr(dots + 2));
    if (lo > hi || hi > 64) throw std::invalid_argument("bad k range: " + s);
    for (auto k = lo; k <= hi; ++k) ks.push_back(static_cast<unsigned>(k));
  } else {
    for (const auto& item : split(s, ',')) {
      const auto k = parse_digits(item);
      if (k > 64) throw std::invalid_argument("k too large: " + item);
      ks.push_back(static_cast<unsigned>(k));
    }
  }
  if (ks.empty()) throw std::invalid_argument("empty k list");
  return ks;
}

unsigned parse_threads(const std::string& s) {
  if (s == "auto") return 0;
  const auto n = parse_digits(s);
  if (n < 1 || n > 4096) throw std::invalid_argument("--threads must be a positive integer or auto");
  return static_cast<unsigned>(n);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Shifted-prime divisor function experiments"};
  app.require_subcommand(1);

  auto* omega = app.add_subcommand("omega", "build the w* table and print S_1, max and argmax");
  omega->add_option("--x", c.x, "table length")->required();
  add_common(omega, c);
  add_sieve(omega, c);
  omega->get_option("--out")->description("binary table dump path");

  auto* moments = app.add_subcommand("moments", "exact moments S_k(x) on a grid");
  moments->add_option("--x-grid", c.x_grid, "a:b:factor or comma list");
  moments->add_option("--x", c.x, "single x");
  moments->add_option("--k", c.k, "k list or range, default 1..3");
  add_common(moments, c);
  add_sieve(moments, c);

  auto* pk = app.add_subcommand("pk", "P_k(x) and the tuple identity for S_k(x)");
  pk->add_option("--x", c.x)->required();
  pk->add_option("--k", c.k, "default 2");
  pk->add_option("--budget", c.budget, "DFS node budget");
  add_common(pk, c);
  add_sieve(pk, c);

  auto* verify = app.add_subcommand("verify", "run a verification campaign");
  verify->add_option("check", c.check, "check name")->required()->check(CLI::IsMember(check_names()));
  verify->add_option("--k", c.k, "k list or range");
  verify->add_option("--trials", c.trials, "random trials per k");
  verify->add_option("--seed", c.seed, "64-bit seed");
  verify->add_option("--max-exp", c.max_exp, "exponent cap for the profile census");
  verify->add_option("--primes", c.primes, "census primes, comma list");
  add_common(verify, c);

  auto* dist = app.add_subcommand("distribution", "N(x, y) and the Markov check");
  dist->add_option("--x", c.x)->required();
  dist->add_option("--y-grid", c.y_grid, "a:b:factor or comma list");
  dist->add_option("--k", c.k, "Markov exponents, default 1..4");
  add_common(dist, c);
  add_sieve(dist, c);

  auto* profile = app.add_subcommand("profile", "level profile of w*(n) in (e^l, e^{l+1}]");
  profile->add_option("--x", c.x)->required();
  profile->add_option("--j", c.j, "weight exponent");
  add_common(profile, c);
  add_sieve(profile, c);

  auto* wirsing = app.add_subcommand("wirsing", "logarithmic averages of a multiplicative function");
  wirsing->add_option("--spec", c.spec, "JSON file or inline JSON")->required();
  wirsing->add_option("--x-grid", c.x_grid, "a:b:factor or comma list");
  wirsing->add_option("--x", c.x, "single x");
  wirsing->add_option("--shifted", c.shifted, "average over n = (p - 1)/V for this V instead");
  wirsing->add_option("--segment", c.segment, "sieve segment length");
  add_common(wirsing, c);

  auto* fit = app.add_subcommand("fit", "slopes of ln(S_k/x) against ln ln x from moments.csv");
  fit->add_option("input", c.input, "moments.csv")->required();
  add_common(fit, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    require_format(c);
    if (*omega) return cmd_omega(c, out);
    if (*moments) return cmd_moments(c, out);
    if (*pk) return cmd_pk(c, out);
    if (*verify) return cmd_verify(c, out);
    if (*dist) return cmd_distribution(c, out, err);
    if (*profile) return cmd_profile(c, out, err);
    if (*wirsing) return cmd_wirsing(c, out);
    if (*fit) return cmd_fit(c, out, err);
  } catch (const CounterexampleError& e) {
    err << "counterexample: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const std::range_error& e) {
    err << "overflow: " << e.what() << "\n";
    return kResource;
  } catch (const std::bad_alloc&) {
    err << "out of memory\n";
    return kResource;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kResource;
  }
  return kUsage;
}

}  // namespace omegastar::cli
