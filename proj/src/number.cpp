#include "permlab/number.hpp"

#include <algorithm>

namespace permlab {

namespace {

std::string_view strip_minus(std::string_view text, bool& negative) {
  negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  } else if (text.size() >= 3 && text.substr(0, 3) == "\xE2\x88\x92") {
    negative = true;
    text.remove_prefix(3);
  }
  return text;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(Int128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  UInt128 u = negative ? UInt128(0) - static_cast<UInt128>(v) : static_cast<UInt128>(v);
  std::string out;
  while (u != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (negative) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

Int128 parse_int128(std::string_view text) {
  bool negative = false;
  std::string_view digits = strip_minus(trim(text), negative);
  if (!all_digits(digits)) throw ParseError("not an integer: '" + std::string(text) + "'");
  Int128 v = 0;
  for (char c : digits) {
    // Accumulate negatively so that INT128_MIN parses.
    if (!checked_mul(v, 10, v) || !checked_add(v, -(c - '0'), v))
      throw OverflowError("integer literal exceeds 128 bits: '" + std::string(text) + "'");
  }
  if (!negative) {
    if (v == -(static_cast<Int128>(static_cast<UInt128>(1) << 127)))
      throw OverflowError("integer literal exceeds 128 bits: '" + std::string(text) + "'");
    v = -v;
  }
  return v;
}

BigInt to_bigint(UInt128 v) {
  BigInt hi = static_cast<std::uint64_t>(v >> 64);
  BigInt lo = static_cast<std::uint64_t>(v);
  return (hi << 64) | lo;
}

BigInt to_bigint(Int128 v) {
  if (v >= 0) return to_bigint(static_cast<UInt128>(v));
  return -to_bigint(UInt128(0) - static_cast<UInt128>(v));
}

Int128 to_int128(const BigInt& v) {
  static const BigInt limit = BigInt(1) << 127;
  if (v >= limit || v < -limit) throw OverflowError("value exceeds 128 bits: " + v.str());
  const bool negative = v < 0;
  BigInt a = negative ? BigInt(-v) : v;
  const auto lo = static_cast<std::uint64_t>(a & BigInt(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(a >> 64);
  UInt128 u = (static_cast<UInt128>(hi) << 64) | lo;
  return negative ? static_cast<Int128>(UInt128(0) - u) : static_cast<Int128>(u);
}

Rational parse_rational(std::string_view text) {
  std::string_view t = trim(text);
  bool negative = false;
  t = strip_minus(t, negative);
  const auto slash = t.find('/');
  std::string_view num = t.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : t.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den))
    throw ParseError("not a rational: '" + std::string(text) + "'");
  BigInt n{std::string(num)};
  BigInt d{std::string(den)};
  if (d == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  Rational q(n, d);
  return negative ? Rational(-q) : q;
}

std::string fraction_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

std::string value_string(const Rational& q) {
  if (is_integer(q)) return boost::multiprecision::numerator(q).str();
  return fraction_string(q);
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

std::string decimal_string(const Rational& q, int digits) {
  const BigInt scale = pow_int(BigInt(10), static_cast<std::uint64_t>(digits));
  BigInt scaled = floor_div(boost::multiprecision::numerator(q) * scale, boost::multiprecision::denominator(q));
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  return negative ? "-" + s : s;
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt pow_int(const BigInt& base, std::uint64_t e) {
  BigInt r = 1, b = base;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

Rational pow_rat(const Rational& base, std::uint64_t e) {
  return Rational(pow_int(boost::multiprecision::numerator(base), e),
                  pow_int(boost::multiprecision::denominator(base), e));
}

}  // namespace permlab
