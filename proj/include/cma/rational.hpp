#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cma {

using Z = mpz_class;
using Q = mpq_class;

// Raised when a caller breaks an operation's precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Q pow2(long e);

Z floor_q(const Q& x);
Z ceil_q(const Q& x);

// Rational enclosures of sqrt(x) for x >= 0: lo <= sqrt(x) <= hi, each within 2^-k.
Q sqrt_lo(const Q& x, unsigned k);
Q sqrt_hi(const Q& x, unsigned k);

// Dyadic roundings with denominator 2^bits.
Q round_down(const Q& x, unsigned bits);
Q round_up(const Q& x, unsigned bits);
// Largest multiple of 2^-bits strictly below x.
Q dyadic_below(const Q& x, unsigned bits);

// "num/den", or "num" when den = 1.
std::string to_exact(const Q& x);
// Decimal rendering with `digits` fractional digits, rounded half away from zero.
std::string to_decimal(const Q& x, unsigned digits);

Q parse_rational(const std::string& s);

// Bit length of |x| as an unsigned integer.
std::size_t bit_length(const Z& x);

}  // namespace cma
