#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace nnb {

// Exact rational scalar. All function values, coefficients and L1/L2 norms
// in this library are mpq_class; floating point appears only in the Lp
// routines that take a non-integer exponent.
using Rational = mpq_class;
using Integer = mpz_class;

// 2^k for possibly negative k.
inline Rational pow2(long k) {
  Rational r(1);
  if (k >= 0)
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(k));
  else
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-k));
  return r;
}

// Renders "p/q" in lowest terms with q > 0, always including the denominator.
inline std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Parses "p/q" or a bare integer "p". Requires q > 0. Returns nullopt on any
// deviation (whitespace, empty fields, zero or signed denominator).
std::optional<Rational> parse_fraction(std::string_view text);

// Exact rational value of a finite double (doubles are dyadic rationals).
inline Rational rational_from_double(double x) { return Rational(x); }

// Square root when the canonical numerator and denominator are both perfect
// squares; nullopt otherwise.
std::optional<Rational> exact_sqrt(const Rational& q);

inline Rational rational_abs(const Rational& q) {
  Rational r;
  mpq_abs(r.get_mpq_t(), q.get_mpq_t());
  return r;
}

}  // namespace nnb
