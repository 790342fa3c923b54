#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace permlab {

using Int128 = __int128;
using UInt128 = unsigned __int128;
using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Error classes. The CLI maps each onto a distinct exit code.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string to_string(Int128 v);
Int128 parse_int128(std::string_view text);

BigInt to_bigint(Int128 v);
BigInt to_bigint(UInt128 v);
// Throws OverflowError when v does not fit.
Int128 to_int128(const BigInt& v);

/// Parses "a", "-a", or "a/b" (b > 0). A leading U+2212 minus is accepted.
Rational parse_rational(std::string_view text);
/// Always "a/b", including b == 1.
std::string fraction_string(const Rational& q);
/// "a" for integers, "a/b" otherwise.
std::string value_string(const Rational& q);
/// Truncated decimal expansion with `digits` fractional digits (floor toward -inf).
std::string decimal_string(const Rational& q, int digits);

inline bool is_integer(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt binomial(std::uint64_t n, std::uint64_t k);
BigInt pow_int(const BigInt& base, std::uint64_t e);
Rational pow_rat(const Rational& base, std::uint64_t e);

inline bool checked_add(Int128 a, Int128 b, Int128& out) {
  return !__builtin_add_overflow(a, b, &out);
}
inline bool checked_mul(Int128 a, Int128 b, Int128& out) {
  return !__builtin_mul_overflow(a, b, &out);
}

}  // namespace permlab
