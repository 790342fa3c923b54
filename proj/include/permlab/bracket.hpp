#pragma once

#include <cstdint>

#include "permlab/number.hpp"

namespace permlab {

/// Closed rational interval [lo, hi] known to contain some real quantity.
/// Arithmetic rounds endpoints outward to dyadic rationals with `bits`
/// fractional bits, so denominators stay bounded.
struct Bracket {
  Rational lo;
  Rational hi;

  static Bracket exact(const Rational& q) { return {q, q}; }
  Rational width() const { return hi - lo; }
  bool contains(const Rational& q) const { return lo <= q && q <= hi; }
};

Rational round_down(const Rational& q, unsigned bits);
Rational round_up(const Rational& q, unsigned bits);

Bracket operator+(const Bracket& a, const Bracket& b);
Bracket operator-(const Bracket& a, const Bracket& b);
Bracket operator-(const Bracket& a);
Bracket mul(const Bracket& a, const Bracket& b, unsigned bits);
Bracket div(const Bracket& a, const Bracket& b, unsigned bits);  // 0 not in b
Bracket pow(const Bracket& a, std::uint64_t e, unsigned bits);   // a.lo >= 0

/// sqrt(q) for q >= 0, width <= 2^-bits.
Bracket sqrt_bracket(const Rational& q, unsigned bits);
/// exp(x), relative width about 2^-bits.
Bracket exp_bracket(const Rational& x, unsigned bits);

/// a < b holds for every pair of points in the brackets.
inline bool certainly_less(const Bracket& a, const Bracket& b) { return a.hi < b.lo; }
inline bool certainly_leq(const Bracket& a, const Bracket& b) { return a.hi <= b.lo; }

}  // namespace permlab
