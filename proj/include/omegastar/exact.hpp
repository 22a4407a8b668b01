#pragma once

#include <gmpxx.h>

#include <cstdint>

#include "omegastar/wide.hpp"

namespace omegastar {

inline mpz_class to_mpz(u128 v) {
  mpz_class hi = static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64));
  mpz_class lo = static_cast<unsigned long>(static_cast<std::uint64_t>(v));
  return (hi << 64) + lo;
}

inline mpz_class to_mpz(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

inline mpz_class pow_mpz(std::uint64_t base, unsigned long exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), exp);
  return r;
}

}  // namespace omegastar
