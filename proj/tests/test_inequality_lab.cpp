#include "doctest.h"

#include "json.hpp"

#include "permlab/inequality_lab.hpp"

using namespace permlab;

namespace {

const FiniteDist kRad = FiniteDist::rademacher();

std::vector<FiniteDist> copies(const FiniteDist& d, std::size_t m) { return std::vector<FiniteDist>(m, d); }

std::vector<std::uint64_t> all_subsets(std::size_t n, std::size_t s) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
    if (static_cast<std::size_t>(__builtin_popcountll(m)) == s) out.push_back(m);
  return out;
}

}  // namespace

TEST_CASE("monotonicity examples") {
  const auto r = check_monotonicity(kRad, kRad);
  CHECK(r.outcome == Outcome::holds);
  CHECK(r.lhs == Rational(1, 2));
  CHECK(*r.rhs == Rational(1, 2));

  const FiniteDist x = FiniteDist::uniform({Rational(0), Rational(1), Rational(3)});
  const auto shifted = check_monotonicity(x, FiniteDist::point_mass(5));
  CHECK(shifted.outcome == Outcome::holds);
  CHECK(shifted.lhs == *shifted.rhs);
}

TEST_CASE("duplication examples") {
  const auto r = check_duplication(kRad, kRad);
  CHECK(r.outcome == Outcome::holds);
  CHECK(r.lhs == Rational(1, 4));
  CHECK(*r.rhs == Rational(1, 4));

  const FiniteDist x({{Rational(0), Rational(1, 5)}, {Rational(2), Rational(4, 5)}});
  const auto pm = check_duplication(FiniteDist::point_mass(1), x);
  CHECK(pm.outcome == Outcome::holds);
  CHECK(pm.lhs == Rational(16, 25));
  CHECK(*pm.rhs == Rational(17, 25));
}

TEST_CASE("kesten ratio examples") {
  const auto four = kesten_ratio(copies(kRad, 4), Rational(1, 2));
  CHECK(four.outcome == Outcome::measured);
  CHECK(four.lhs == Rational(6, 16));
  CHECK(*four.constant_squared == Rational(9, 8));
  CHECK(four.constant->lo < Rational(106066017177983, 100000000000000));
  CHECK(four.constant->hi > Rational(106066017177982, 100000000000000));
  CHECK(four.constant->width() < Rational(1, 1000000000));

  const auto one = kesten_ratio(copies(kRad, 1), Rational(1, 2));
  CHECK(one.lhs == Rational(1, 2));
  CHECK(*one.constant_squared == Rational(1, 2));

  const auto twenty = kesten_ratio(copies(kRad, 20), Rational(1, 2));
  CHECK(twenty.lhs == Rational(binomial(20, 10), BigInt(1) << 20));
  // constant^2 = Q^2 (1/2) 20 / (1/4) = 40 Q^2
  CHECK(*twenty.constant_squared == 40 * twenty.lhs * twenty.lhs);

  CHECK_THROWS_AS(kesten_ratio({FiniteDist::point_mass(0)}, Rational(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(kesten_ratio(copies(kRad, 2), Rational(1)), std::invalid_argument);
}

TEST_CASE("relative halasz examples") {
  // n = 8, k = 1 sits exactly on the boundary P = 1 - 4k/n = 1/2.
  CHECK(check_relative_halasz(ThinningSpec(1, copies(kRad, 8))).outcome == Outcome::precondition_failed);

  const auto ten = check_relative_halasz(ThinningSpec(1, copies(kRad, 10)));
  CHECK(ten.outcome == Outcome::measured);
  CHECK(ten.lhs == Rational(252, 1024));
  // P = 1/2, so constant^2 = Q^2 n (1-P)^2 / (k P^2) = 10 Q^2.
  CHECK(*ten.constant_squared == 10 * ten.lhs * ten.lhs);

  const FiniteDist pm = FiniteDist::point_mass(2);
  CHECK(check_relative_halasz(ThinningSpec(1, copies(pm, 10))).outcome == Outcome::precondition_failed);

  auto mixed = copies(kRad, 10);
  mixed.push_back(pm);
  mixed.push_back(pm);
  const auto m = check_relative_halasz(ThinningSpec(1, mixed));
  CHECK(m.outcome == Outcome::measured);
  CHECK(m.constant_squared.has_value());
  CHECK(*m.constant_squared > 0);

  // k >= n/4 is rejected.
  CHECK(check_relative_halasz(ThinningSpec(3, copies(kRad, 12))).outcome == Outcome::precondition_failed);
}

TEST_CASE("relative assumption examples") {
  const auto full = check_relative_assumption(ThinningSpec(2, copies(kRad, 40)), Rational(1), Rational(1, 2));
  CHECK(full.outcome == Outcome::holds);
  CHECK(full.lhs == Rational(3, 8));
  CHECK(*full.rhs == Rational(3, 4));

  const auto guard = check_relative_assumption(ThinningSpec(2, copies(kRad, 16)), Rational(1), Rational(1, 2));
  CHECK(guard.outcome == Outcome::precondition_failed);

  // Half Rademacher, half point masses: gamma = 1/2 needs k >= 4, hence n > 64.
  auto half = copies(kRad, 33);
  for (int i = 0; i < 32; ++i) half.push_back(FiniteDist::point_mass(1));
  const auto h = check_relative_assumption(ThinningSpec(4, half), Rational(1, 2), Rational(1, 2));
  CHECK(h.outcome == Outcome::holds);
  CHECK(h.lhs <= *h.rhs);

  // Too few good summands for gamma = 1/2.
  auto sparse = copies(kRad, 30);
  for (int i = 0; i < 35; ++i) sparse.push_back(FiniteDist::point_mass(1));
  CHECK(check_relative_assumption(ThinningSpec(4, sparse), Rational(1, 2), Rational(1, 2)).outcome ==
        Outcome::precondition_failed);

  // 2/gamma <= k fails for gamma = 1/2, k = 2.
  CHECK(check_relative_assumption(ThinningSpec(2, half), Rational(1, 2), Rational(1, 2)).outcome ==
        Outcome::precondition_failed);
}

TEST_CASE("heavy pairs examples") {
  const SetFamily full(5, 2, all_subsets(5, 2));
  const auto hf = heavy_pairs(full, Rational(1));
  CHECK(hf.pairs.size() == 20);
  CHECK(hf.size_guarantee == 10);

  const SetFamily star(4, 2, {SetFamily::mask({1, 2}), SetFamily::mask({1, 3}), SetFamily::mask({1, 4})});
  const auto hs = heavy_pairs(star, Rational(1, 2));
  CHECK(hs.degree_threshold == Rational(3, 4));
  CHECK(hs.size_guarantee == 3);
  CHECK(hs.pairs.size() == 6);

  const SetFamily two(3, 1, {SetFamily::mask({1}), SetFamily::mask({2})});
  const auto ht = heavy_pairs(two, Rational(2, 3));
  CHECK(ht.degree_threshold == 1);
  CHECK(ht.size_guarantee == 1);
  REQUIRE(ht.pairs.size() == 2);
  CHECK(ht.pairs[0].second == 0);
  CHECK(ht.pairs[1].second == 0);

  CHECK_THROWS_AS(heavy_pairs(two, Rational(1)), std::invalid_argument);
  CHECK_THROWS(SetFamily(3, 2, {SetFamily::mask({1})}));
  CHECK_THROWS(SetFamily(3, 1, {SetFamily::mask({4})}));
}

TEST_CASE("heavy pairs degree condition") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(31, i);
    const std::size_t n = 3 + rng.uniform(5);
    const std::size_t s = 1 + rng.uniform(n);
    auto all = all_subsets(n, s);
    const std::size_t keep = 1 + rng.uniform(all.size());
    for (std::size_t j = 0; j < keep; ++j) std::swap(all[j], all[j + rng.uniform(all.size() - j)]);
    all.resize(keep);
    const Rational alpha(static_cast<long long>(keep), static_cast<long long>(all_subsets(n, s).size()));
    const SetFamily fam(n, s, all);
    const auto h = heavy_pairs(fam, alpha);
    for (const auto& [f, g] : h.pairs) {
      CHECK((f & g) == g);
      CHECK(__builtin_popcountll(g) + 1 == static_cast<int>(s));
      long long degree = 0;
      for (auto m : all) degree += (m & g) == g;
      CHECK(Rational(degree) > h.degree_threshold);
    }
    CHECK(Rational(static_cast<long long>(h.pairs.size())) >= h.size_guarantee);
  }
}

TEST_CASE("batteries hold and ignore worker count") {
  const BatteryConfig one{300, 5, 1}, four{300, 5, 4};
  for (auto battery : {monotonicity_battery, duplication_battery, assumption_battery, heavy_pairs_battery}) {
    const auto a = battery(one);
    const auto b = battery(four);
    CHECK(a.outcome == Outcome::holds);
    CHECK(report_to_json(a) == report_to_json(b));
  }
  const auto hz = halasz_battery(BatteryConfig{200, 5, 1}, 10);
  CHECK(hz.outcome == Outcome::measured);
  CHECK(report_to_json(hz) == report_to_json(halasz_battery(BatteryConfig{200, 5, 3}, 10)));

  const auto k = kesten_rademacher_battery(2, 12);
  CHECK(k.outcome == Outcome::measured);
  CHECK(*k.constant_squared >= Rational(9, 8));
}

TEST_CASE("report json shape") {
  const auto j = nlohmann::json::parse(report_to_json(kesten_ratio(copies(kRad, 4), Rational(1, 2))));
  CHECK(j["outcome"] == "measured");
  CHECK(j["holds"] == true);
  CHECK(j["lhs"] == "3/8");
  CHECK(j["constant_squared"] == "9/8");
  CHECK(j["constant_lo"] == "1.060660171779");
  CHECK(j["constant_hi"] == "1.060660171780");
  CHECK(j["m"] == "4");
}
