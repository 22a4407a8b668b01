#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace omegastar {

// One widening level above 64 bits. Everything that can exceed it either
// fails with std::range_error or is carried at the valuation level.
using u128 = unsigned __int128;
using i128 = __int128;

constexpr u128 u128_max = ~u128{0};

inline u128 checked_mul(u128 a, u128 b) {
  u128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::range_error("128-bit multiplication overflow");
  }
  return r;
}

inline u128 checked_add(u128 a, u128 b) {
  u128 r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::range_error("128-bit addition overflow");
  }
  return r;
}

inline u128 checked_pow(u128 base, unsigned exp) {
  u128 r = 1;
  for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

/// Narrow to 64 bits, throwing if the value does not fit.
inline std::uint64_t narrow_u64(u128 v) {
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw std::range_error("value does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

inline std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(static_cast<u128>(-(v + 1)) + 1);
  return to_string(static_cast<u128>(v));
}

}  // namespace omegastar
