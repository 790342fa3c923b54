#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>

#include "permlab/bracket.hpp"
#include "permlab/number.hpp"
#include "permlab/philox.hpp"

using namespace permlab;

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("−2/3") == Rational(-2, 3));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK(fraction_string(Rational(4)) == "4/1");
  CHECK(value_string(Rational(4)) == "4");
  CHECK(value_string(Rational(-3, 9)) == "-1/3");
  CHECK(decimal_string(Rational(2, 3), 4) == "0.6666");
  CHECK(decimal_string(Rational(-1, 3), 2) == "-0.34");
}

TEST_CASE("int128 conversions") {
  const Int128 big = Int128{1} << 100;
  CHECK(parse_int128(to_string(big)) == big);
  CHECK(parse_int128(to_string(-big)) == -big);
  CHECK(to_string(Int128{0}) == "0");
  CHECK(to_int128(to_bigint(big)) == big);
  CHECK_THROWS_AS(to_int128(pow_int(BigInt(2), 127)), OverflowError);
  Int128 out;
  CHECK_FALSE(checked_mul(big, big, out));
  CHECK(checked_add(big, big, out));
  CHECK(out == (Int128{1} << 101));
}

TEST_CASE("binomials and powers") {
  CHECK(binomial(6, 2) == 15);
  CHECK(binomial(20, 10) == 184756);
  CHECK(binomial(3, 5) == 0);
  CHECK(pow_rat(Rational(1, 2), 10) == Rational(1, 1024));
  CHECK(floor_div(BigInt(-7), BigInt(2)) == -4);
}

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors from the Random123 distribution.
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter rng streams are reproducible and distinct") {
  CounterRng a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);

  CounterRng r(1, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.uniform(6);
    CHECK(v < 6);
    seen.insert(v);
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("dyadic rounding") {
  const Rational third(1, 3);
  CHECK(round_down(third, 4) == Rational(5, 16));
  CHECK(round_up(third, 4) == Rational(6, 16));
  CHECK(round_down(Rational(3, 8), 4) == Rational(3, 8));
  CHECK(round_up(Rational(-1, 3), 4) == Rational(-5, 16));
}

TEST_CASE("sqrt and exp brackets") {
  const Bracket s = sqrt_bracket(Rational(2), 60);
  CHECK(s.lo <= Rational(1414213562373096, 1000000000000000));
  CHECK(s.hi >= Rational(1414213562373095, 1000000000000000));
  CHECK(s.width() <= Rational(1) / pow_rat(Rational(2), 60));
  CHECK(s.lo * s.lo <= 2);
  CHECK(s.hi * s.hi >= 2);

  CHECK(sqrt_bracket(Rational(9, 4), 30).contains(Rational(3, 2)));
  CHECK(sqrt_bracket(Rational(0), 30).contains(Rational(0)));

  const Bracket e = exp_bracket(Rational(1), 64);
  CHECK(e.lo < Rational(2718281828459046, 1000000000000000));
  CHECK(e.hi > Rational(2718281828459045, 1000000000000000));
  CHECK(e.width() < Rational(1) / pow_rat(Rational(2), 60));

  const Bracket em = exp_bracket(Rational(-20), 64);
  CHECK(em.lo > 0);
  CHECK(em.lo < Rational(BigInt("20611536224386"), BigInt("10000000000000000000000")));
  CHECK(em.hi > Rational(BigInt("20611536224385"), BigInt("10000000000000000000000")));

  CHECK(exp_bracket(Rational(0), 32).contains(Rational(1)));
}

TEST_CASE("bracket arithmetic is outward") {
  const Bracket a{Rational(1, 3), Rational(1, 2)};
  const Bracket b{Rational(-1), Rational(2)};
  const Bracket p = mul(a, b, 10);
  CHECK(p.lo <= Rational(-1, 2));
  CHECK(p.hi >= Rational(1));
  const Bracket q = div(Bracket::exact(Rational(1)), Bracket::exact(Rational(3)), 20);
  CHECK(q.contains(Rational(1, 3)));
  CHECK(q.width() <= Rational(2) / pow_rat(Rational(2), 20));
  CHECK(pow(a, 3, 30).contains(Rational(1, 27)));
  CHECK(certainly_less(a, Bracket::exact(Rational(3, 5))));
  CHECK_FALSE(certainly_less(a, b));
}
