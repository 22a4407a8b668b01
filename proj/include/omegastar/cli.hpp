#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace omegastar::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kResource = 3 };

/// Runs one command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1000", "10^6", "1e6" -> integer; throws std::invalid_argument.
std::uint64_t parse_count(const std::string& s);
/// "a:b:factor" geometric grid, or a comma list; must be ascending.
std::vector<std::uint64_t> parse_grid(const std::string& s);
/// "2..6", "1,2,3" or "4".
std::vector<unsigned> parse_k_list(const std::string& s);
/// "auto" -> 0, else a positive integer.
unsigned parse_threads(const std::string& s);

}  // namespace omegastar::cli
