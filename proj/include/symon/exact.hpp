#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace symon {

using BigInt = mpz_class;
using Rational = mpq_class;

inline BigInt big(std::uint64_t x) {
  BigInt out;
  mpz_import(out.get_mpz_t(), 1, -1, sizeof(x), 0, 0, &x);
  return out;
}

inline BigInt big_pow(std::uint64_t base, unsigned long exp) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exp);
  return out;
}

inline std::string to_string(const BigInt& x) { return x.get_str(); }

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace symon
