#include "permlab/bracket.hpp"

#include <algorithm>
#include <stdexcept>

namespace permlab {

namespace mp = boost::multiprecision;

Rational round_down(const Rational& q, unsigned bits) {
  const BigInt scale = BigInt(1) << bits;
  return Rational(floor_div(mp::numerator(q) * scale, mp::denominator(q)), scale);
}

Rational round_up(const Rational& q, unsigned bits) { return -round_down(-q, bits); }

Bracket operator+(const Bracket& a, const Bracket& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Bracket operator-(const Bracket& a, const Bracket& b) { return {a.lo - b.hi, a.hi - b.lo}; }
Bracket operator-(const Bracket& a) { return {-a.hi, -a.lo}; }

Bracket mul(const Bracket& a, const Bracket& b, unsigned bits) {
  const Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {round_down(*std::min_element(c, c + 4), bits), round_up(*std::max_element(c, c + 4), bits)};
}

Bracket div(const Bracket& a, const Bracket& b, unsigned bits) {
  if (b.lo <= 0 && b.hi >= 0) throw std::domain_error("Bracket div: divisor bracket contains zero");
  const Bracket inv{round_down(1 / b.hi, bits), round_up(1 / b.lo, bits)};
  return mul(a, inv, bits);
}

Bracket pow(const Bracket& a, std::uint64_t e, unsigned bits) {
  if (a.lo < 0) throw std::domain_error("Bracket pow: negative base");
  Bracket r = Bracket::exact(1), base = a;
  while (e) {
    if (e & 1) r = mul(r, base, bits);
    e >>= 1;
    if (e) base = mul(base, base, bits);
  }
  return r;
}

Bracket sqrt_bracket(const Rational& q, unsigned bits) {
  if (q < 0) throw std::domain_error("sqrt_bracket: negative argument");
  const BigInt scale = BigInt(1) << (2 * bits);
  const BigInt target = floor_div(mp::numerator(q) * scale, mp::denominator(q));
  const BigInt root = mp::sqrt(target);
  const BigInt unit = BigInt(1) << bits;
  Rational lo(root, unit);
  const bool exact = root * root == target && Rational(target, scale) == q;
  return {lo, exact ? lo : Rational(root + 1, unit)};
}

Bracket exp_bracket(const Rational& x, unsigned bits) {
  if (x == 0) return Bracket::exact(1);
  const Rational y = x < 0 ? Rational(-x) : x;
  unsigned halvings = 0;
  Rational u = y;
  while (u > Rational(1, 2)) {
    u /= 2;
    ++halvings;
  }
  const unsigned w = bits + halvings + 16;
  const Rational unit(BigInt(1), BigInt(1) << w);
  // Taylor series on [0, 1/2]; tail after term k is bounded by term k. Upward
  // rounding keeps term_hi >= unit, so stop once it reaches the grid floor.
  Rational term_lo = 1, term_hi = 1, sum_lo = 1, sum_hi = 1;
  for (unsigned k = 1;; ++k) {
    term_lo = round_down(term_lo * u / k, w);
    term_hi = round_up(term_hi * u / k, w);
    sum_lo += term_lo;
    sum_hi += term_hi;
    if (term_hi <= unit) {
      sum_hi += term_hi;
      break;
    }
  }
  Bracket r{sum_lo, sum_hi};
  for (unsigned i = 0; i < halvings; ++i) r = mul(r, r, w);
  if (x < 0) r = Bracket{round_down(1 / r.hi, w), round_up(1 / r.lo, w)};
  return r;
}

}  // namespace permlab
